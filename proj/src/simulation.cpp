#include "lipwalk/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "lipwalk/errors.hpp"

namespace lipwalk {

namespace {

// Slack for windows that end exactly at the step boundary.
constexpr double kWindowSlack = 1e-12;
// Relative slack when assigning sample times to steps.
constexpr double kBoundarySlack = 1e-9;

std::vector<Segment> build_segments(double step_time, const Disturbance* push, PushModel model, double mass) {
  if (push == nullptr || push->force == 0.0 || push->duration == 0.0) return {{step_time, 0.0, 0.0}};

  const double t0 = push->phase * step_time;
  std::vector<Segment> segs;
  if (model == PushModel::exact_force) {
    const double t1 = std::min(t0 + push->duration, step_time);
    if (t0 > 0.0) segs.push_back({t0, 0.0, 0.0});
    segs.push_back({t1 - t0, push->force, 0.0});
    if (step_time - t1 > 0.0) segs.push_back({step_time - t1, 0.0, 0.0});
  } else {
    const double mid = t0 + 0.5 * push->duration;
    if (mid > 0.0) segs.push_back({mid, 0.0, 0.0});
    segs.push_back({step_time - mid, 0.0, push->force * push->duration / mass});
  }
  return segs;
}

GaitState advance(const WalkerParams& params, GaitState s, const Segment& seg, double dt) {
  s.xdot += seg.velocity_jump;
  return flow_forced(params, s, seg.force, dt);
}

// State at local time tau within a step, evaluated from the nearest segment start.
GaitState state_in_step(const WalkerParams& params, const StepRecord& rec, double tau) {
  GaitState s = rec.start_state;
  double seg_start = 0.0;
  for (std::size_t k = 0; k < rec.segments.size(); ++k) {
    const Segment& seg = rec.segments[k];
    const bool last = k + 1 == rec.segments.size();
    if (last || tau < seg_start + seg.duration) {
      return advance(params, s, seg, std::max(0.0, tau - seg_start));
    }
    s = advance(params, s, seg, seg.duration);
    seg_start += seg.duration;
  }
  return s;
}

}  // namespace

void validate_disturbances(std::span<const Disturbance> disturbances, double step_time, int n_steps) {
  std::set<int> seen;
  for (const Disturbance& d : disturbances) {
    const std::string tag = "disturbance at step " + std::to_string(d.step_index);
    if (d.step_index < 1 || d.step_index > n_steps) {
      throw ConfigError(tag + ": step index must lie in [1, " + std::to_string(n_steps) + "]");
    }
    if (!seen.insert(d.step_index).second) throw ConfigError(tag + ": more than one disturbance in the same step");
    if (!std::isfinite(d.phase) || d.phase < 0.0 || d.phase >= 1.0) throw ConfigError(tag + ": phase must lie in [0, 1)");
    if (!std::isfinite(d.duration) || d.duration < 0.0) throw ConfigError(tag + ": duration must be non-negative");
    if (!std::isfinite(d.force)) throw ConfigError(tag + ": force must be finite");
    if (d.phase * step_time + d.duration > step_time * (1.0 + kWindowSlack)) {
      throw ConfigError(tag + ": force window extends past the end of the step");
    }
  }
}

SimTrace simulate(const WalkerParams& params, const GaitCycle& cycle, const Gains& gains,
                  std::span<const Disturbance> disturbances, const SimOptions& options, std::string controller) {
  if (options.n_steps < 1) throw ConfigError("n_steps must be at least 1");
  if (!std::isfinite(options.sample_rate_hz) || options.sample_rate_hz <= 0.0) {
    throw ConfigError("sample rate must be positive");
  }
  const double T = cycle.step_time;
  validate_disturbances(disturbances, T, options.n_steps);

  SimTrace trace{params, cycle, gains, std::move(controller), {}, {}};
  trace.steps.reserve(static_cast<std::size_t>(options.n_steps));

  GaitState state = cycle.fixed_point;
  double cop = 0.0;
  for (int i = 1; i <= options.n_steps; ++i) {
    const auto push = std::find_if(disturbances.begin(), disturbances.end(),
                                   [i](const Disturbance& d) { return d.step_index == i; });

    StepRecord rec;
    rec.index = i;
    rec.t_start = (i - 1) * T;
    rec.start_state = state;
    rec.cop_world = cop;

    const StepError err = step_error(cycle, state);
    rec.error_norm = err.norm();
    rec.L_commanded = cycle.step_length + control(gains, err);
    const SaturatedStep applied = saturate_step(cycle, params, rec.L_commanded - cycle.step_length);
    rec.L_applied = applied.length;
    rec.clamped = applied.clamped;

    rec.segments = build_segments(T, push == disturbances.end() ? nullptr : &*push, options.push_model, params.m());
    rec.end_state = replay_step(params, rec);

    state = support_exchange(rec.end_state, rec.L_applied);
    cop += rec.L_applied;
    trace.steps.push_back(std::move(rec));
  }

  // Samples on a uniform grid, each evaluated in closed form from its segment start.
  const double total = options.n_steps * T;
  const auto n_samples = static_cast<std::size_t>(std::floor(total * options.sample_rate_hz + 1e-9)) + 1;
  trace.samples.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double t = static_cast<double>(k) / options.sample_rate_hz;
    auto j = static_cast<int>(std::floor(t / T + kBoundarySlack));
    j = std::clamp(j, 0, options.n_steps - 1);
    const StepRecord& rec = trace.steps[static_cast<std::size_t>(j)];
    const double tau = std::clamp(t - rec.t_start, 0.0, T);
    const GaitState s = state_in_step(params, rec, tau);
    const GrfSample f = grf(params, s);
    trace.samples.push_back({t, s.x + rec.cop_world, s.x, s.xdot, rec.cop_world, f.fx, f.fy});
  }
  return trace;
}

GaitState replay_step(const WalkerParams& params, const StepRecord& record) {
  GaitState s = record.start_state;
  for (const Segment& seg : record.segments) s = advance(params, s, seg, seg.duration);
  return s;
}

std::vector<double> step_sequence_errors(std::span<const StepRecord> steps) {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const StepRecord& r : steps) out.push_back(r.error_norm);
  return out;
}

std::optional<int> convergence_step(std::span<const StepRecord> steps, int after_step, double tolerance) {
  std::optional<int> candidate;
  for (const StepRecord& r : steps) {
    if (r.index <= after_step) continue;
    if (r.error_norm < tolerance) {
      if (!candidate) candidate = r.index;
    } else {
      candidate.reset();
    }
  }
  return candidate;
}

PhasePortrait phase_portrait(std::span<const StepRecord> steps, std::span<const Sample> samples) {
  PhasePortrait out;
  std::size_t k = 0;
  const double slack = steps.size() > 1 ? kBoundarySlack * (steps[1].t_start - steps[0].t_start) : 0.0;
  for (std::size_t j = 0; j < steps.size(); ++j) {
    const StepRecord& rec = steps[j];
    const double t_end = j + 1 < steps.size() ? steps[j + 1].t_start : std::numeric_limits<double>::infinity();

    out.step_begin.push_back(out.points.size());
    out.points.push_back({rec.start_state.x, rec.start_state.xdot});
    while (k < samples.size() && samples[k].t < t_end - slack && samples[k].t <= rec.t_start + slack) ++k;
    for (; k < samples.size() && samples[k].t < t_end - slack; ++k) {
      // The final sample coincides with the last step's end state.
      if (j + 1 == steps.size() && k + 1 == samples.size()) break;
      out.points.push_back({samples[k].x_rel, samples[k].xdot});
    }
    out.points.push_back({rec.end_state.x, rec.end_state.xdot});

    out.reset_indices.push_back(out.points.size() - 1);
    if (j + 1 == steps.size()) {
      const GaitState next = support_exchange(rec.end_state, rec.L_applied);
      out.points.push_back({next.x, next.xdot});
    }
  }
  return out;
}

PhasePortrait phase_portrait(const SimTrace& trace) { return phase_portrait(trace.steps, trace.samples); }

}  // namespace lipwalk
