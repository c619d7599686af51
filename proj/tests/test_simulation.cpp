#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "lipwalk/errors.hpp"
#include "lipwalk/simulation.hpp"
#include "oracles.hpp"

using namespace lipwalk;

namespace {

const WalkerParams kReference = WalkerParams::reference();
const GaitCycle kCycle = design_cycle(kReference, 0.5, 0.4);
const StepMatrices kM = build_step_matrices(kReference, 0.4);
const Disturbance kPush{3, 0.5, -20.0, 0.02};

SimTrace run(const Gains& g, std::vector<Disturbance> pushes, int n = 20, PushModel model = PushModel::exact_force) {
  SimOptions opts;
  opts.n_steps = n;
  opts.push_model = model;
  return simulate(kReference, kCycle, g, pushes, opts, "test");
}

// Distance from a phase-plane point to the nominal cycle (flow arc plus reset chord).
double distance_to_cycle(const PhasePoint& p) {
  double best = std::hypot(p.x - kCycle.fixed_point.x, p.xdot - kCycle.fixed_point.xdot);
  constexpr int kN = 4000;
  for (int k = 0; k <= kN; ++k) {
    const GaitState s = flow(kReference, kCycle.fixed_point, kCycle.step_time * k / kN);
    best = std::min(best, std::hypot(p.x - s.x, p.xdot - s.xdot));
  }
  // Reset chord is horizontal at xdot = x_c.xdot between x = +L/2 and -L/2.
  const double xd = kCycle.fixed_point.xdot;
  const double cx = std::clamp(p.x, -0.25, 0.25);
  best = std::min(best, std::hypot(p.x - cx, p.xdot - xd));
  return best;
}

}  // namespace

TEST_CASE("undisturbed walking stays on the cycle") {
  const SimTrace t = run(pole_place(kM, 0.0, 0.0), {});
  REQUIRE(t.steps.size() == 20);
  for (const StepRecord& r : t.steps) {
    CHECK(r.error_norm < 1e-9);
    CHECK(std::abs(r.L_applied - 0.5) < 1e-9);
    CHECK_FALSE(r.clamped);
  }
  for (double e : step_sequence_errors(t.steps)) CHECK(e < 1e-9);

  const SimTrace open = run(open_loop_gains(kM), {}, 10);
  for (const StepRecord& r : open.steps) CHECK(r.L_applied == 0.5);
}

TEST_CASE("push window changes velocity by the impulse") {
  const SimTrace t = run(pole_place(kM, 0.0, 0.0), {kPush});
  const StepRecord& r = t.steps[2];
  REQUIRE(r.segments.size() == 3);
  CHECK(r.segments[1].force == -20.0);
  CHECK(std::abs(r.segments[1].duration - 0.02) < 1e-15);

  const GaitState before = flow(kReference, r.start_state, 0.2);
  const GaitState after = flow_forced(kReference, before, -20.0, 0.02);
  const GaitState free_after = flow(kReference, before, 0.02);
  const double dv = after.xdot - free_after.xdot;
  CHECK(std::abs(dv - -0.008) < 2e-5);

  // First-order bound: w^2 * (window displacement) * dT.
  const double disp = std::abs(after.x - before.x);
  CHECK(std::abs(dv - -20.0 * 0.02 / 50.0) <= kReference.omega() * kReference.omega() * disp * 0.02 + 1e-12);
}

TEST_CASE("deadbeat recovery from the reference push") {
  const SimTrace t = run(pole_place(kM, 0.0, 0.0), {kPush});
  const auto errors = step_sequence_errors(t.steps);
  CHECK(errors[2] < 1e-9);  // push acts mid-step, the step start is clean
  CHECK(errors[3] > 1e-3);
  // Two full post-disturbance steps annihilate the error.
  CHECK(errors[5] < 1e-8);
  for (std::size_t i = 5; i < errors.size(); ++i) CHECK(errors[i] < 1e-6);

  const auto settled = convergence_step(t.steps, 3, 1e-6);
  REQUIRE(settled.has_value());
  CHECK(*settled - 3 <= 3);
}

TEST_CASE("open-loop growth follows the unstable eigenvalue") {
  const SimTrace t = run(open_loop_gains(kM), {kPush}, 10);
  const auto e = step_sequence_errors(t.steps);
  const double unstable = open_loop_eigenvalues(kM)[0];
  CHECK(std::abs(unstable - 3.4980) < 1e-3);
  // Step 4 carries the first error; ratios settle from step 6 onwards.
  for (std::size_t i = 5; i < e.size(); ++i) CHECK(std::abs(e[i] / e[i - 1] - unstable) / unstable < 0.02);
  CHECK_FALSE(convergence_step(t.steps, 3, 1e-3).has_value());
}

TEST_CASE("trace invariants") {
  const std::vector<Gains> controllers{pole_place(kM, 0.0, 0.0), pole_place(kM, 0.6, 0.1),
                                       lqr_gains(kM, LqrWeights::identity(1.0)), open_loop_gains(kM)};
  auto g = oracle::rng(41);
  for (const Gains& K : controllers) {
    std::vector<Disturbance> pushes{kPush};
    pushes.push_back({7, oracle::uniform(g, 0.0, 0.9), oracle::uniform(g, -40.0, 40.0), 0.01});
    const SimTrace t = run(K, pushes, 12);

    for (std::size_t i = 0; i < t.steps.size(); ++i) {
      const StepRecord& r = t.steps[i];
      // Replay consistency.
      CHECK((replay_step(kReference, r).vec() - r.end_state.vec()).norm() < 1e-12);
      // The COM does not move across a support exchange.
      if (i + 1 < t.steps.size()) {
        const StepRecord& n = t.steps[i + 1];
        CHECK(std::abs((r.end_state.x + r.cop_world) - (n.start_state.x + n.cop_world)) < 1e-12);
        CHECK(n.start_state.xdot == r.end_state.xdot);
        CHECK(std::abs(n.cop_world - (r.cop_world + r.L_applied)) < 1e-12);
      }
    }

    const double dt = 1.0 / 1000.0;
    REQUIRE(t.samples.size() == 4801);
    for (std::size_t k = 0; k < t.samples.size(); ++k) {
      const Sample& s = t.samples[k];
      CHECK(std::abs(s.x_world - (s.x_rel + s.cop_world)) < 1e-12);
      CHECK(s.fy == doctest::Approx(490.0));
      if (k > 0) {
        CHECK(s.t > t.samples[k - 1].t);
        CHECK(std::abs((s.t - t.samples[k - 1].t) - dt) < 1e-12);
      }
    }
  }
}

TEST_CASE("simulation matches the discrete map without pushes") {
  auto g = oracle::rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Gains K = pole_place(kM, oracle::uniform(g, -0.9, 0.9), oracle::uniform(g, -0.9, 0.9));
    // Start off the cycle so the feedback has work to do.
    const SimTrace t = run(K, {{1, 0.0, oracle::uniform(g, -30.0, 30.0), 0.05}}, 15);
    // Step 1 carries the push; every later step is a plain map application.
    for (std::size_t i = 1; i + 1 < t.steps.size(); ++i) {
      const GaitState mapped = apply_step(kM, t.steps[i].start_state, t.steps[i].L_applied);
      CHECK((t.steps[i + 1].start_state.vec() - mapped.vec()).norm() < 1e-10);
    }

    // Closed loop iterated purely in the discrete domain from step 2 on.
    GaitState s = t.steps[1].start_state;
    for (std::size_t i = 1; i < t.steps.size(); ++i) {
      CHECK((t.steps[i].start_state.vec() - s.vec()).norm() < 1e-10);
      const double L = saturate_step(kCycle, kReference, control(K, step_error(kCycle, s))).length;
      s = apply_step(kM, s, L);
    }
  }
}

TEST_CASE("impulse push model") {
  const SimTrace exact = run(pole_place(kM, 0.0, 0.0), {kPush});
  const SimTrace impulse = run(pole_place(kM, 0.0, 0.0), {kPush}, 20, PushModel::impulse);
  const StepRecord& r = impulse.steps[2];
  REQUIRE(r.segments.size() == 2);
  CHECK(std::abs(r.segments[0].duration - 0.21) < 1e-15);
  CHECK(r.segments[1].velocity_jump == doctest::Approx(-0.008));
  // Both models agree to second order in the window length.
  CHECK((exact.steps[3].start_state.vec() - impulse.steps[3].start_state.vec()).norm() < 1e-5);
}

TEST_CASE("determinism") {
  const Gains K = lqr_gains(kM, LqrWeights::identity(1.0));
  const SimTrace a = run(K, {kPush});
  const SimTrace b = run(K, {kPush});
  REQUIRE(a.samples.size() == b.samples.size());
  CHECK(std::memcmp(a.samples.data(), b.samples.data(), a.samples.size() * sizeof(Sample)) == 0);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(std::memcmp(&a.steps[i].end_state, &b.steps[i].end_state, sizeof(GaitState)) == 0);
    CHECK(std::memcmp(&a.steps[i].L_applied, &b.steps[i].L_applied, sizeof(double)) == 0);
  }
}

TEST_CASE("saturation is recorded") {
  // A violent push at high gain asks for an out-of-range step.
  const SimTrace t = run(pole_place(kM, 0.0, 0.0), {{3, 0.5, -2000.0, 0.05}}, 8);
  bool any = false;
  for (const StepRecord& r : t.steps) {
    if (r.clamped) {
      any = true;
      CHECK(r.L_applied != r.L_commanded);
      CHECK((r.L_applied == 0.0 || r.L_applied == kReference.l_max()));
    } else {
      CHECK(r.L_applied == r.L_commanded);
    }
  }
  CHECK(any);
}

TEST_CASE("configuration errors") {
  const Gains K = pole_place(kM, 0.0, 0.0);
  SimOptions opts;
  opts.n_steps = 10;
  auto bad = [&](Disturbance d) {
    const std::vector<Disturbance> ds{d};
    CHECK_THROWS_AS(simulate(kReference, kCycle, K, ds, opts), ConfigError);
  };
  bad({0, 0.5, -20.0, 0.02});
  bad({11, 0.5, -20.0, 0.02});
  bad({3, 1.0, -20.0, 0.02});
  bad({3, -0.1, -20.0, 0.02});
  bad({3, 0.99, -20.0, 0.02});
  bad({3, 0.5, -20.0, -0.01});
  bad({3, 0.5, NAN, 0.01});
  const std::vector<Disturbance> twice{kPush, kPush};
  CHECK_THROWS_AS(simulate(kReference, kCycle, K, twice, opts), ConfigError);

  // A window that ends exactly at touchdown is fine.
  const std::vector<Disturbance> edge{{3, 0.5, -20.0, 0.2}};
  CHECK_NOTHROW(simulate(kReference, kCycle, K, edge, opts));

  opts.n_steps = 0;
  CHECK_THROWS_AS(simulate(kReference, kCycle, K, {}, opts), ConfigError);
}

TEST_CASE("phase portrait") {
  SUBCASE("steady cycle closes with horizontal resets") {
    const SimTrace t = run(pole_place(kM, 0.0, 0.0), {}, 5);
    const PhasePortrait p = phase_portrait(t);
    REQUIRE(p.reset_indices.size() == 5);
    CHECK(std::hypot(p.points.back().x - p.points.front().x, p.points.back().xdot - p.points.front().xdot) < 1e-6);
    for (std::size_t k : p.reset_indices) {
      REQUIRE(k + 1 < p.points.size());
      CHECK(p.points[k + 1].xdot == p.points[k].xdot);
      CHECK(std::abs((p.points[k].x - p.points[k + 1].x) - 0.5) < 1e-9);
    }
  }

  SUBCASE("disturbed run leaves and re-enters a tube around the cycle") {
    const SimTrace t = run(pole_place(kM, 0.0, 0.0), {kPush}, 10);
    const PhasePortrait p = phase_portrait(t);
    for (std::size_t j = 0; j < p.reset_indices.size(); ++j) {
      const PhasePoint& a = p.points[p.reset_indices[j]];
      const PhasePoint& b = p.points[p.reset_indices[j] + 1];
      CHECK(a.xdot == b.xdot);
      CHECK(std::abs((a.x - b.x) - t.steps[j].L_applied) < 1e-12);
    }
    bool left = false;
    for (std::size_t k = p.step_begin[3]; k < p.step_begin[4]; ++k) left |= distance_to_cycle(p.points[k]) > 1e-3;
    CHECK(left);
    for (std::size_t k = p.step_begin[6]; k < p.points.size(); ++k) CHECK(distance_to_cycle(p.points[k]) < 1e-3);
  }

  SUBCASE("each step contributes its interior samples once") {
    const SimTrace t = run(pole_place(kM, 0.0, 0.0), {}, 3);
    const PhasePortrait p = phase_portrait(t);
    // 400 samples per step: start + 399 interior + end, plus one final exchange point.
    CHECK(p.points.size() == 3 * 401 + 1);
  }
}
