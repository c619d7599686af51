#pragma once

// Step-length feedback u_i = -K^T e_i around a gait cycle.

#include <cstddef>

#include "lipwalk/step_map.hpp"

namespace lipwalk {

/// Requested closed-loop poles: two real values or a complex-conjugate pair.
class PolePair {
 public:
  static PolePair real(double lambda1, double lambda2);
  static PolePair conjugate(double re, double im);

  const EigenPair& values() const { return values_; }
  double sum() const;
  double product() const;
  double max_magnitude() const;

 private:
  explicit PolePair(EigenPair values) : values_(values) {}
  EigenPair values_;
};

struct Gains {
  double k1 = 0.0;  // on position error
  double k2 = 0.0;  // on velocity error [s]
  EigenPair poles{};  // eigenvalues of A - B K^T

  Vec2 vec() const { return {k1, k2}; }
  double spectral_radius() const;
};

class LqrWeights {
 public:
  /// Q must be exactly symmetric with non-negative eigenvalues; R > 0.
  LqrWeights(const Mat2& Q, double R);
  static LqrWeights identity(double R) { return LqrWeights(Mat2::Identity(), R); }

  const Mat2& Q() const { return Q_; }
  double R() const { return R_; }

 private:
  Mat2 Q_;
  double R_;
};

struct DareSolution {
  Mat2 P = Mat2::Zero();
  std::size_t iterations = 0;
  double residual = 0.0;  // infinity norm of the Riccati defect at P
};

struct DareOptions {
  double tolerance = 1e-12;  // on successive iterates (inf norm), floored at 16 ulp of |P|
  std::size_t max_iterations = 1'000'000;
};

struct LqrDesign {
  Gains gains;
  DareSolution dare;
};

Mat2 closed_loop_matrix(const StepMatrices& M, const Vec2& K);

/// Gains that leave the open-loop dynamics untouched (K = 0).
Gains open_loop_gains(const StepMatrices& M);

/// Closed-form pole placement for the 2-state step map.
/// Throws InvalidPoles if any |lambda| >= 1, Uncontrollable if A21 vanishes.
Gains pole_place(const StepMatrices& M, const PolePair& poles);
Gains pole_place(const StepMatrices& M, double lambda1, double lambda2);

/// ||A'PA - A'PB (R + B'PB)^-1 B'PA - P + Q||_inf
double dare_residual(const StepMatrices& M, const LqrWeights& W, const Mat2& P);

/// Stabilizing DARE solution by value iteration seeded at P0 = Q.
/// Throws SolverFailure when the iteration cap is reached.
DareSolution solve_dare(const StepMatrices& M, const LqrWeights& W, const DareOptions& options = {});

LqrDesign design_lqr(const StepMatrices& M, const LqrWeights& W, const DareOptions& options = {});
Gains lqr_gains(const StepMatrices& M, const LqrWeights& W);

/// u = -(k1 e_x + k2 e_xdot)
double control(const Gains& K, const StepError& e);

struct SaturatedStep {
  double length = 0.0;
  bool clamped = false;
};

/// clamp(L_c + u, 0, L_max)
SaturatedStep saturate_step(const GaitCycle& cycle, const WalkerParams& params, double u);

}  // namespace lipwalk
