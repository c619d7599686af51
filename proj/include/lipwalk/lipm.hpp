#pragma once

// Linear inverted pendulum: single-support dynamics xdd = (g/h) x with x the
// horizontal COM position relative to the COP.

#include "lipwalk/linalg.hpp"

namespace lipwalk {

struct GaitState {
  double x = 0.0;     // COM relative to COP [m]
  double xdot = 0.0;  // COM velocity [m/s]

  Vec2 vec() const { return {x, xdot}; }
  static GaitState from(const Vec2& v) { return {v(0), v(1)}; }
  bool finite() const;

  friend bool operator==(const GaitState&, const GaitState&) = default;
};

/// Physical constants of the walker. omega = sqrt(g/h) is derived once here.
class WalkerParams {
 public:
  /// Throws InvalidArgument unless every argument is finite and positive.
  WalkerParams(double h, double g, double m, double l_max);

  /// h = 1 m, g = 9.8 m/s^2, m = 50 kg, L_max = 0.75 m.
  static WalkerParams reference();

  double h() const { return h_; }
  double g() const { return g_; }
  double m() const { return m_; }
  double l_max() const { return l_max_; }
  double omega() const { return omega_; }

 private:
  double h_;
  double g_;
  double m_;
  double l_max_;
  double omega_;
};

struct GrfSample {
  double fx = 0.0;             // [N]
  double fy = 0.0;             // [N]
  double hdot_residual = 0.0;  // fx*h - fy*x [N m]
};

/// Exact single-support flow over a duration t >= 0.
GaitState flow(const WalkerParams& params, const GaitState& s0, double t);

/// Exact flow of xdd = omega^2 x + F/m. With F == 0 this is bit-identical to flow().
GaitState flow_forced(const WalkerParams& params, const GaitState& s0, double force, double t);

/// Ground reaction under constant COM height and zero centroidal momentum rate.
GrfSample grf(const WalkerParams& params, const GaitState& s);

/// Orbital energy per unit mass, 0.5 xdot^2 - (g/2h) x^2. Conserved by flow().
double orbital_energy(const WalkerParams& params, const GaitState& s);

}  // namespace lipwalk
