#include "lipwalk/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace lipwalk {

EigenPair eigenvalues(const Mat2& m) {
  const double half_trace = 0.5 * (m(0, 0) + m(1, 1));
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  // (a - d)^2 / 4 + bc avoids forming half_trace^2 - det for near-equal roots.
  const double half_diff = 0.5 * (m(0, 0) - m(1, 1));
  const double disc = half_diff * half_diff + m(0, 1) * m(1, 0);

  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double big = half_trace + std::copysign(root, half_trace);
    double other = big != 0.0 ? det / big : half_trace - root;
    double first = big;
    if (other > first) std::swap(first, other);
    return {std::complex<double>(first, 0.0), std::complex<double>(other, 0.0)};
  }
  const double im = std::sqrt(-disc);
  return {std::complex<double>(half_trace, im), std::complex<double>(half_trace, -im)};
}

double spectral_radius(const Mat2& m) {
  const auto ev = eigenvalues(m);
  return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

double inf_norm(const Mat2& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

bool all_finite(const Mat2& m) { return m.allFinite(); }

}  // namespace lipwalk
