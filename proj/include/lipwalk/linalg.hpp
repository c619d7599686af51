#pragma once

#include <array>
#include <complex>

#include <Eigen/Core>

namespace lipwalk {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

using EigenPair = std::array<std::complex<double>, 2>;

/// Closed-form eigenvalues of a real 2x2 matrix.
///
/// Real pairs are returned in descending order; complex pairs are returned
/// with the positive imaginary part first. The smaller-magnitude real root is
/// recovered from det/λ to avoid cancellation.
EigenPair eigenvalues(const Mat2& m);

double spectral_radius(const Mat2& m);

// Maximum absolute row sum.
double inf_norm(const Mat2& m);

bool all_finite(const Mat2& m);

}  // namespace lipwalk
