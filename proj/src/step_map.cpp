#include "lipwalk/step_map.hpp"

#include <cmath>
#include <string>

#include "lipwalk/errors.hpp"

namespace lipwalk {

StepMatrices build_step_matrices(const WalkerParams& params, double T) {
  if (!std::isfinite(T) || T <= 0.0) throw InvalidArgument("step duration must be positive");
  const double w = params.omega();
  const double c = std::cosh(w * T);
  const double s = std::sinh(w * T);
  StepMatrices M;
  M.A << c, s / w,
         w * s, c;
  M.B << -1.0, 0.0;
  M.T = T;
  return M;
}

GaitState support_exchange(const GaitState& end_of_step, double L) { return {end_of_step.x - L, end_of_step.xdot}; }

GaitState apply_step(const StepMatrices& M, const GaitState& s0, double L) {
  if (!s0.finite() || !std::isfinite(L)) throw InvalidArgument("apply_step inputs must be finite");
  return GaitState::from(M.A * s0.vec() + M.B * L);
}

GaitCycle design_cycle(const WalkerParams& params, double L_c, double T_c) {
  if (!std::isfinite(L_c) || L_c <= 0.0 || L_c > params.l_max()) {
    throw ConstraintViolation("cycle step length L_c = " + std::to_string(L_c) + " must lie in (0, L_max = " +
                              std::to_string(params.l_max()) + "]");
  }
  if (!std::isfinite(T_c) || T_c <= 0.0) throw InvalidArgument("cycle step time T_c must be positive");

  const double w = params.omega();
  // (e^{wT} + 1) / (e^{wT} - 1) == coth(wT / 2)
  const double coth_half = 1.0 / std::tanh(0.5 * w * T_c);
  GaitCycle cycle;
  cycle.step_length = L_c;
  cycle.step_time = T_c;
  cycle.fixed_point = {-0.5 * L_c, 0.5 * L_c * w * coth_half};
  return cycle;
}

StepError step_error(const GaitCycle& cycle, const GaitState& step_start) {
  return {step_start.vec() - cycle.fixed_point.vec()};
}

std::array<double, 2> open_loop_eigenvalues(const StepMatrices& M) {
  const auto ev = eigenvalues(M.A);
  return {ev[0].real(), ev[1].real()};
}

ControllabilityCertificate is_controllable(const StepMatrices& M) {
  Mat2 C;
  C.col(0) = M.B;
  C.col(1) = M.A * M.B;
  const double det = C(0, 0) * C(1, 1) - C(0, 1) * C(1, 0);
  return {std::abs(det) > kControllabilityThreshold, det};
}

}  // namespace lipwalk
