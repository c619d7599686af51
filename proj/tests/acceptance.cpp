// End-to-end acceptance checks for the reference walker. Prints one line per
// criterion and exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "lipwalk/simulation.hpp"
#include "oracles.hpp"

using namespace lipwalk;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

const WalkerParams kParams = WalkerParams::reference();
const Disturbance kPush{3, 0.5, -20.0, 0.02};

// Median wall time of `reps` calls, in milliseconds.
double median_ms(const std::function<void()>& fn, int reps = 11) {
  std::vector<double> t;
  for (int i = 0; i < reps; ++i) {
    const auto a = Clock::now();
    fn();
    t.push_back(std::chrono::duration<double, std::milli>(Clock::now() - a).count());
  }
  std::nth_element(t.begin(), t.begin() + reps / 2, t.end());
  return t[static_cast<std::size_t>(reps / 2)];
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double max_deviation(const SimTrace& t) {
  double dev = 0.0;
  for (const StepRecord& r : t.steps) dev = std::max(dev, std::abs(r.L_applied - t.cycle.step_length));
  return dev;
}

SimTrace run(const GaitCycle& cycle, const Gains& g, const std::vector<Disturbance>& pushes, int n = 20) {
  SimOptions opts;
  opts.n_steps = n;
  return simulate(kParams, cycle, g, pushes, opts);
}

Outcome fixed_point() {
  GaitCycle c;
  const double ms = median_ms([&] { c = design_cycle(kParams, 0.5, 0.4); });
  Outcome o;
  o.pass = c.fixed_point.x == -0.25 && std::abs(c.fixed_point.xdot - 1.4092) <= 0.0005 && ms < 1.0;
  o.detail = fmt("x_c = (%.17g, %.6f), design time %.4f ms", c.fixed_point.x, c.fixed_point.xdot, ms);
  return o;
}

Outcome instability() {
  const auto ev = open_loop_eigenvalues(build_step_matrices(kParams, 0.4));
  Outcome o;
  const double product = ev[0] * ev[1];
  o.pass = std::abs(ev[0] - 3.498) <= 0.002 && std::abs(ev[1] - 0.2859) <= 0.0002 && std::abs(product - 1.0) <= 1e-10 &&
           ev[0] > 1.0;
  o.detail = fmt("eigenvalues (%.6f, %.6f), product - 1 = %.2e", ev[0], ev[1], product - 1.0);
  return o;
}

Outcome pole_placement() {
  auto g = oracle::rng(1001);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const StepMatrices M = build_step_matrices(kParams, oracle::uniform(g, 0.1, 1.0));
    PolePair poles = PolePair::real(0.0, 0.0);
    if (i % 2 == 0) {
      poles = PolePair::real(oracle::uniform(g, -0.99, 0.99), oracle::uniform(g, -0.99, 0.99));
    } else {
      const double r = oracle::uniform(g, 0.0, 0.99);
      const double th = oracle::uniform(g, 0.0, M_PI);
      poles = PolePair::conjugate(r * std::cos(th), r * std::sin(th));
    }
    const Gains K = pole_place(M, poles);
    const auto got = oracle::eig(closed_loop_matrix(M, K.vec()));
    const auto& want = poles.values();
    const double direct = std::max(std::abs(got[0] - want[0]), std::abs(got[1] - want[1]));
    const double swapped = std::max(std::abs(got[0] - want[1]), std::abs(got[1] - want[0]));
    worst = std::max(worst, std::min(direct, swapped));
  }
  const Gains deadbeat = pole_place(build_step_matrices(kParams, 0.4), 0.0, 0.0);
  Outcome o;
  o.pass = worst < 1e-8 && std::abs(deadbeat.k1 - -3.7839) <= 1e-3 && std::abs(deadbeat.k2 - -1.2250) <= 1e-3;
  o.detail = fmt("worst pole error %.2e over 1000 cases, deadbeat K = (%.5f, %.5f)", worst, deadbeat.k1, deadbeat.k2);
  return o;
}

Outcome dare_quality() {
  const StepMatrices M = build_step_matrices(kParams, 0.4);
  Outcome o;
  for (double R : {0.01, 1.0, 100.0}) {
    const LqrWeights W = LqrWeights::identity(R);
    LqrDesign d;
    const double ms = median_ms([&] { d = design_lqr(M, W); });
    const double defect = oracle::dare_defect(M.A, M.B, W.Q(), R, d.dare.P).cwiseAbs().rowwise().sum().maxCoeff();
    const double rho = spectral_radius(closed_loop_matrix(M, d.gains.vec()));
    const bool ok = defect < 1e-9 && rho < 1.0 && ms < 10.0;
    o.pass = o.pass && ok;
    o.detail += fmt("R=%g: defect %.2e, rho %.4f, %.3f ms; ", R, defect, rho, ms);
  }
  return o;
}

Outcome scenario() {
  const GaitCycle cycle = design_cycle(kParams, 0.5, 0.4);
  const Gains K = pole_place(build_step_matrices(kParams, 0.4), 0.0, 0.0);
  SimTrace t = run(cycle, K, {kPush});
  const double ms = median_ms([&] { t = run(cycle, K, {kPush}); });
  const auto settled = convergence_step(t.steps, kPush.step_index, 1e-3);
  const double closure = (t.steps.back().start_state.vec() - cycle.fixed_point.vec()).norm();
  const PhasePortrait p = phase_portrait(t);
  const double loop_gap = std::hypot(p.points.back().x - cycle.fixed_point.x, p.points.back().xdot - cycle.fixed_point.xdot);
  Outcome o;
  o.pass = settled && *settled - kPush.step_index <= 3 && closure < 1e-3 && loop_gap < 1e-3 && ms < 100.0;
  o.detail = fmt("settled %g steps after the push, final-cycle gap %.2e, run %.3f ms", settled ? *settled - kPush.step_index : -1.0,
                 std::max(closure, loop_gap), ms);
  return o;
}

Outcome input_weight_trend() {
  const GaitCycle cycle = design_cycle(kParams, 0.5, 0.4);
  const StepMatrices M = build_step_matrices(kParams, 0.4);
  const SimTrace light = run(cycle, lqr_gains(M, LqrWeights::identity(1.0)), {kPush});
  const SimTrace heavy = run(cycle, lqr_gains(M, LqrWeights::identity(100.0)), {kPush});
  const auto s1 = convergence_step(light.steps, kPush.step_index, 1e-3);
  const auto s100 = convergence_step(heavy.steps, kPush.step_index, 1e-3);
  Outcome o;
  o.pass = max_deviation(heavy) < max_deviation(light) && s1 && s100 && *s100 >= *s1;
  o.detail = fmt("max |L-L_c|: R=1 %.5f, R=100 %.5f; convergence step R=1 %g, R=100 %g", max_deviation(light),
                 max_deviation(heavy), s1 ? *s1 : -1.0, s100 ? *s100 : -1.0);
  return o;
}

Outcome oracle_suites() {
  auto g = oracle::rng(1007);
  double flow_err = 0.0, map_err = 0.0, energy_err = 0.0, replay_err = 0.0;
  bool deterministic = true;

  for (int i = 0; i < 1000; ++i) {
    // Flow vs RK4 on states with norm up to 10 over at most 1 s.
    const double r = oracle::uniform(g, 0.0, 10.0);
    const double th = oracle::uniform(g, 0.0, 2.0 * M_PI);
    const GaitState s{r * std::cos(th), r * std::sin(th)};
    const double t = oracle::uniform(g, 0.0, 1.0);
    const GaitState exact = flow(kParams, s, t);
    const auto ref = oracle::rk4(kParams.omega(), 0.0, {s.x, s.xdot}, t);
    flow_err = std::max({flow_err, std::abs(exact.x - ref[0]), std::abs(exact.xdot - ref[1])});
  }

  for (int i = 0; i < 1000; ++i) {
    const StepMatrices M = build_step_matrices(kParams, oracle::uniform(g, 0.05, 1.0));
    const GaitState s{oracle::uniform(g, -0.5, 0.5), oracle::uniform(g, -2.0, 2.0)};
    const double L = oracle::uniform(g, 0.0, 0.75);
    map_err = std::max(map_err, (apply_step(M, s, L).vec() - support_exchange(flow(kParams, s, M.T), L).vec()).norm());

    const double t = oracle::uniform(g, 0.0, 1.0);
    energy_err = std::max(energy_err, std::abs(orbital_energy(kParams, flow(kParams, s, t)) - orbital_energy(kParams, s)));
  }

  const StepMatrices M = build_step_matrices(kParams, 0.4);
  const GaitCycle cycle = design_cycle(kParams, 0.5, 0.4);
  for (int i = 0; i < 1000; ++i) {
    const Gains K = i % 3 == 0 ? lqr_gains(M, LqrWeights::identity(std::pow(10.0, oracle::uniform(g, -2.0, 2.0))))
                               : pole_place(M, oracle::uniform(g, -0.9, 0.9), oracle::uniform(g, -0.9, 0.9));
    const std::vector<Disturbance> pushes{{static_cast<int>(oracle::uniform(g, 1.0, 10.99)), oracle::uniform(g, 0.0, 0.9),
                                           oracle::uniform(g, -60.0, 60.0), oracle::uniform(g, 0.0, 0.04)}};
    SimOptions opts;
    opts.n_steps = 12;
    opts.sample_rate_hz = 250.0;
    const SimTrace a = simulate(kParams, cycle, K, pushes, opts);
    const SimTrace b = simulate(kParams, cycle, K, pushes, opts);
    for (const StepRecord& rec : a.steps) {
      replay_err = std::max(replay_err, (replay_step(kParams, rec).vec() - rec.end_state.vec()).norm());
    }
    deterministic = deterministic && a.samples.size() == b.samples.size() &&
                    std::memcmp(a.samples.data(), b.samples.data(), a.samples.size() * sizeof(Sample)) == 0;
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
      deterministic = deterministic && std::memcmp(&a.steps[k].end_state, &b.steps[k].end_state, sizeof(GaitState)) == 0 &&
                      a.steps[k].L_applied == b.steps[k].L_applied;
    }
  }

  Outcome o;
  o.pass = flow_err < 1e-8 && map_err < 1e-12 && energy_err < 1e-10 && replay_err < 1e-12 && deterministic;
  o.detail = fmt("flow/RK4 %.2e, map/flow %.2e, energy %.2e, replay %.2e", flow_err, map_err, energy_err, replay_err) +
             (deterministic ? ", reruns bit-identical" : ", reruns DIFFER");
  return o;
}

Outcome open_loop_growth() {
  const GaitCycle cycle = design_cycle(kParams, 0.5, 0.4);
  const StepMatrices M = build_step_matrices(kParams, 0.4);
  const SimTrace t = run(cycle, open_loop_gains(M), {kPush}, 10);
  const double unstable = open_loop_eigenvalues(M)[0];
  const auto e = step_sequence_errors(t.steps);
  // Ratios from three steps after the push onwards: e_6/e_5, e_7/e_6, ...
  double worst = 0.0;
  for (std::size_t i = static_cast<std::size_t>(kPush.step_index) + 2; i < e.size(); ++i) {
    worst = std::max(worst, std::abs(e[i] / e[i - 1] - unstable) / unstable);
  }
  Outcome o;
  o.pass = std::abs(unstable - 3.498) <= 0.002 && worst <= 0.02;
  o.detail = fmt("ratio e6/e5 = %.4f, worst relative gap %.2f%% vs %.4f", e[5] / e[4], 100.0 * worst, unstable);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*check)();
  };
  const Criterion criteria[] = {
      {"AC1 fixed-point reproduction", &fixed_point},
      {"AC2 open-loop instability certificate", &instability},
      {"AC3 pole-placement fidelity", &pole_placement},
      {"AC4 DARE quality", &dare_quality},
      {"AC5 push-recovery scenario", &scenario},
      {"AC6 input-weight trend", &input_weight_trend},
      {"AC7 oracle suites", &oracle_suites},
      {"AC8 open-loop growth", &open_loop_growth},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
