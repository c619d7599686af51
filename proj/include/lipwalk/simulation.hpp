#pragma once

// Hybrid closed-loop walking: exact single-support flow, instantaneous support
// exchange, horizontal pushes and once-per-step length feedback.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lipwalk/stabilizer.hpp"

namespace lipwalk {

/// Constant horizontal force on the COM over a window inside one step.
struct Disturbance {
  int step_index = 1;     // 1-based
  double phase = 0.5;     // window start as a fraction of the step time, [0, 1)
  double force = 0.0;     // [N]
  double duration = 0.0;  // [s]
};

enum class PushModel {
  exact_force,  // forced closed-form flow across the window
  impulse,      // velocity jump F*dT/m at the window midpoint
};

/// One piece of a step's continuous phase: an optional velocity jump at its
/// start, then flow under a constant force for `duration`.
struct Segment {
  double duration = 0.0;
  double force = 0.0;
  double velocity_jump = 0.0;
};

struct StepRecord {
  int index = 0;  // 1-based
  double t_start = 0.0;
  GaitState start_state;
  GaitState end_state;  // before the support exchange
  double L_commanded = 0.0;
  double L_applied = 0.0;
  bool clamped = false;
  double error_norm = 0.0;
  double cop_world = 0.0;  // COP at step start
  std::vector<Segment> segments;
};

struct Sample {
  double t = 0.0;
  double x_world = 0.0;
  double x_rel = 0.0;
  double xdot = 0.0;
  double cop_world = 0.0;
  double fx = 0.0;
  double fy = 0.0;
};

struct SimOptions {
  int n_steps = 20;
  double sample_rate_hz = 1000.0;
  PushModel push_model = PushModel::exact_force;
};

struct SimTrace {
  WalkerParams params;
  GaitCycle cycle;
  Gains gains;
  std::string controller;
  std::vector<StepRecord> steps;
  std::vector<Sample> samples;
};

/// Throws ConfigError for windows that fall outside a single step, repeated
/// step indices, or step indices beyond the run.
void validate_disturbances(std::span<const Disturbance> disturbances, double step_time, int n_steps);

SimTrace simulate(const WalkerParams& params, const GaitCycle& cycle, const Gains& gains,
                  std::span<const Disturbance> disturbances, const SimOptions& options,
                  std::string controller = {});

/// Re-propagates a record's segments from its start state.
GaitState replay_step(const WalkerParams& params, const StepRecord& record);

std::vector<double> step_sequence_errors(std::span<const StepRecord> steps);

/// Index of the first step after `after_step` from which every error norm
/// stays below `tolerance`; nullopt if the run never settles.
std::optional<int> convergence_step(std::span<const StepRecord> steps, int after_step, double tolerance);

struct PhasePoint {
  double x = 0.0;
  double xdot = 0.0;
};

/// Phase-plane polyline. The segment points[k] -> points[k+1] is a support
/// exchange for each k in reset_indices; all others are continuous flow.
struct PhasePortrait {
  std::vector<PhasePoint> points;
  std::vector<std::size_t> reset_indices;
  std::vector<std::size_t> step_begin;  // index of each step's first point
};

PhasePortrait phase_portrait(std::span<const StepRecord> steps, std::span<const Sample> samples);
PhasePortrait phase_portrait(const SimTrace& trace);

}  // namespace lipwalk
