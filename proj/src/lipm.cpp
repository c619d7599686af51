#include "lipwalk/lipm.hpp"

#include <cmath>
#include <string>

#include "lipwalk/errors.hpp"

namespace lipwalk {

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw InvalidArgument(std::string(name) + " must be finite and positive, got " + std::to_string(v));
  }
}

void require_flow_args(const GaitState& s0, double t) {
  if (!s0.finite()) throw InvalidArgument("initial state must be finite");
  if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("flow duration must be finite and non-negative");
}

}  // namespace

bool GaitState::finite() const { return std::isfinite(x) && std::isfinite(xdot); }

WalkerParams::WalkerParams(double h, double g, double m, double l_max) : h_(h), g_(g), m_(m), l_max_(l_max) {
  require_positive(h, "h");
  require_positive(g, "g");
  require_positive(m, "m");
  require_positive(l_max, "L_max");
  omega_ = std::sqrt(g_ / h_);
}

WalkerParams WalkerParams::reference() { return WalkerParams(1.0, 9.8, 50.0, 0.75); }

GaitState flow(const WalkerParams& params, const GaitState& s0, double t) {
  require_flow_args(s0, t);
  const double w = params.omega();
  const double c = std::cosh(w * t);
  const double s = std::sinh(w * t);
  return {c * s0.x + s * s0.xdot / w, w * s * s0.x + c * s0.xdot};
}

GaitState flow_forced(const WalkerParams& params, const GaitState& s0, double force, double t) {
  require_flow_args(s0, t);
  if (!std::isfinite(force)) throw InvalidArgument("force must be finite");
  const double w = params.omega();
  // Shifted equilibrium of xdd = w^2 x + F/m.
  const double x_eq = -force / (params.m() * w * w);
  const GaitState shifted = flow(params, {s0.x - x_eq, s0.xdot}, t);
  return {shifted.x + x_eq, shifted.xdot};
}

GrfSample grf(const WalkerParams& params, const GaitState& s) {
  if (!s.finite()) throw InvalidArgument("state must be finite");
  const double w = params.omega();
  GrfSample out;
  out.fx = params.m() * w * w * s.x;
  out.fy = params.m() * params.g();
  out.hdot_residual = out.fx * params.h() - out.fy * s.x;
  return out;
}

double orbital_energy(const WalkerParams& params, const GaitState& s) {
  if (!s.finite()) throw InvalidArgument("state must be finite");
  const double w = params.omega();
  return 0.5 * s.xdot * s.xdot - 0.5 * w * w * s.x * s.x;
}

}  // namespace lipwalk
