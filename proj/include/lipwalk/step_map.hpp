#pragma once

// Step-to-step map between the initial states of consecutive single-support
// phases, with the support exchange modelled as an instantaneous COP shift.

#include "lipwalk/lipm.hpp"

namespace lipwalk {

struct StepMatrices {
  Mat2 A;
  Vec2 B;
  double T = 0.0;  // step duration used to build A [s]
};

/// Desired symmetric gait: step length, step time and the fixed-point state.
struct GaitCycle {
  double step_length = 0.0;  // L_c [m]
  double step_time = 0.0;    // T_c [s]
  GaitState fixed_point;     // x_c
};

struct StepError {
  Vec2 e = Vec2::Zero();

  double norm() const { return e.norm(); }
};

/// Controllability of (A, B); the determinant of [B, AB] equals A21.
struct ControllabilityCertificate {
  bool controllable = false;
  double determinant = 0.0;
};

// Below this |det[B, AB]| the pair is treated as uncontrollable.
inline constexpr double kControllabilityThreshold = 1e-12;

StepMatrices build_step_matrices(const WalkerParams& params, double T);

/// Support exchange: the COP moves forward by L, velocity is unchanged.
GaitState support_exchange(const GaitState& end_of_step, double L);

/// A s0 + B L.
GaitState apply_step(const StepMatrices& M, const GaitState& s0, double L);

/// Fixed point of the step map for the given step length and duration.
/// Throws ConstraintViolation if L_c is outside (0, L_max], InvalidArgument if T_c <= 0.
GaitCycle design_cycle(const WalkerParams& params, double L_c, double T_c);

StepError step_error(const GaitCycle& cycle, const GaitState& step_start);

/// Open-loop eigenvalues {e^{wT}, e^{-wT}}, sorted descending.
std::array<double, 2> open_loop_eigenvalues(const StepMatrices& M);

ControllabilityCertificate is_controllable(const StepMatrices& M);

}  // namespace lipwalk
