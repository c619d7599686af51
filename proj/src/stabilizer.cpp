#include "lipwalk/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "lipwalk/errors.hpp"

namespace lipwalk {

PolePair PolePair::real(double lambda1, double lambda2) {
  if (!std::isfinite(lambda1) || !std::isfinite(lambda2)) throw InvalidPoles("poles must be finite");
  return PolePair({std::complex<double>(lambda1, 0.0), std::complex<double>(lambda2, 0.0)});
}

PolePair PolePair::conjugate(double re, double im) {
  if (!std::isfinite(re) || !std::isfinite(im)) throw InvalidPoles("poles must be finite");
  const double mag = std::abs(im);
  return PolePair({std::complex<double>(re, mag), std::complex<double>(re, -mag)});
}

// Both are real for real pairs and for conjugate pairs.
double PolePair::sum() const { return (values_[0] + values_[1]).real(); }
double PolePair::product() const { return (values_[0] * values_[1]).real(); }

double PolePair::max_magnitude() const { return std::max(std::abs(values_[0]), std::abs(values_[1])); }

double Gains::spectral_radius() const { return std::max(std::abs(poles[0]), std::abs(poles[1])); }

LqrWeights::LqrWeights(const Mat2& Q, double R) : Q_(Q), R_(R) {
  if (!Q.allFinite() || Q(0, 1) != Q(1, 0)) throw InvalidArgument("Q must be finite and exactly symmetric");
  Eigen::SelfAdjointEigenSolver<Mat2> es(Q, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < 0.0) throw InvalidArgument("Q must be positive semidefinite");
  if (!std::isfinite(R) || R <= 0.0) throw InvalidArgument("R must be finite and positive");
}

Mat2 closed_loop_matrix(const StepMatrices& M, const Vec2& K) { return M.A - M.B * K.transpose(); }

Gains open_loop_gains(const StepMatrices& M) {
  Gains g;
  g.poles = eigenvalues(M.A);
  return g;
}

Gains pole_place(const StepMatrices& M, const PolePair& poles) {
  if (poles.max_magnitude() >= 1.0) {
    throw InvalidPoles("requested poles must lie strictly inside the unit circle (max |lambda| = " +
                       std::to_string(poles.max_magnitude()) + ")");
  }
  const double a11 = M.A(0, 0);
  const double a21 = M.A(1, 0);
  if (std::abs(a21) <= kControllabilityThreshold) throw Uncontrollable("A21 vanishes; step length cannot steer velocity");

  Gains g;
  g.k1 = poles.sum() - 2.0 * a11;
  g.k2 = (g.k1 * a11 - poles.product() + 1.0) / a21;
  g.poles = eigenvalues(closed_loop_matrix(M, g.vec()));
  return g;
}

Gains pole_place(const StepMatrices& M, double lambda1, double lambda2) {
  return pole_place(M, PolePair::real(lambda1, lambda2));
}

namespace {

Mat2 riccati_step(const Mat2& A, const Vec2& B, const Mat2& Q, double R, const Mat2& P) {
  const Vec2 PB = P * B;
  const double s = R + B.dot(PB);
  const Vec2 ApB = A.transpose() * PB;
  Mat2 next = A.transpose() * P * A - ApB * ApB.transpose() / s + Q;
  // Keep the iterate exactly symmetric.
  const double off = 0.5 * (next(0, 1) + next(1, 0));
  next(0, 1) = off;
  next(1, 0) = off;
  return next;
}

}  // namespace

double dare_residual(const StepMatrices& M, const LqrWeights& W, const Mat2& P) {
  return inf_norm(riccati_step(M.A, M.B, W.Q(), W.R(), P) - P);
}

DareSolution solve_dare(const StepMatrices& M, const LqrWeights& W, const DareOptions& options) {
  Mat2 P = W.Q();
  double best_change = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const Mat2 next = riccati_step(M.A, M.B, W.Q(), W.R(), P);
    if (!next.allFinite()) {
      throw SolverFailure("Riccati iteration diverged", dare_residual(M, W, P), it);
    }
    const double change = inf_norm(next - P);
    P = next;
    // Large P (heavy input weights) cannot resolve 1e-12 absolute; stop at a
    // few ulps of |P| instead.
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * inf_norm(P);
    if (change < std::max(options.tolerance, floor)) {
      return {P, it, dare_residual(M, W, P)};
    }
    // Near the floor the iterate can cycle on rounding noise; stop once the
    // change no longer shrinks.
    if (change >= best_change && change < 8.0 * floor) {
      return {P, it, dare_residual(M, W, P)};
    }
    best_change = std::min(best_change, change);
  }
  const double residual = dare_residual(M, W, P);
  throw SolverFailure("Riccati iteration did not converge within " + std::to_string(options.max_iterations) +
                          " iterations (last residual " + std::to_string(residual) + ")",
                      residual, options.max_iterations);
}

LqrDesign design_lqr(const StepMatrices& M, const LqrWeights& W, const DareOptions& options) {
  LqrDesign out;
  out.dare = solve_dare(M, W, options);
  const Mat2& P = out.dare.P;
  const Vec2 PB = P * M.B;
  const Vec2 K = (M.A.transpose() * PB) / (W.R() + M.B.dot(PB));
  out.gains.k1 = K(0);
  out.gains.k2 = K(1);
  out.gains.poles = eigenvalues(closed_loop_matrix(M, K));
  return out;
}

Gains lqr_gains(const StepMatrices& M, const LqrWeights& W) { return design_lqr(M, W).gains; }

double control(const Gains& K, const StepError& e) { return -(K.k1 * e.e(0) + K.k2 * e.e(1)); }

SaturatedStep saturate_step(const GaitCycle& cycle, const WalkerParams& params, double u) {
  const double raw = cycle.step_length + u;
  const double clamped = std::clamp(raw, 0.0, params.l_max());
  return {clamped, clamped != raw};
}

}  // namespace lipwalk
