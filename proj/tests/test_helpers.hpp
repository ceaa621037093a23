#pragma once

#include <algorithm>
#include <vector>

#include "pursuit/linalg.hpp"
#include "pursuit/rng.hpp"

namespace pursuit::testing {

/// Sort complex values by argument then modulus, the convention used when
/// comparing closed-form spectra against numeric eigendecompositions.
inline std::vector<Complex> sorted_by_arg(const VecXc& v) {
  std::vector<Complex> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    const double aa = std::abs(a) < 1e-12 ? 0.0 : std::arg(a);
    const double ab = std::abs(b) < 1e-12 ? 0.0 : std::arg(b);
    if (std::abs(aa - ab) > 1e-9) return aa < ab;
    return std::abs(a) < std::abs(b);
  });
  return out;
}

/// Multiset comparison robust to ordering: sort lexicographically by
/// (re, im) with tolerance-insensitive pairing via greedy matching.
inline double multiset_distance(const VecXc& a, const VecXc& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<Complex> rest(b.data(), b.data() + b.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < rest.size(); ++j) {
      const double d = std::abs(a[i] - rest[j]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    worst = std::max(worst, bd);
    rest.erase(rest.begin() + long(best));
  }
  return worst;
}

inline double multiset_distance(const VecX& a, const VecX& b) {
  return multiset_distance(VecXc(a.cast<Complex>()), VecXc(b.cast<Complex>()));
}

inline VecX random_vector(Rng& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
  VecX v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

inline MatX random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c, double lo = -1.0,
                          double hi = 1.0) {
  MatX m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

inline Mat3 random_rotation(Rng& rng) {
  const Vec3 axis(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  return rotation_about_axis(axis.norm() > 1e-9 ? axis : Vec3::UnitX(),
                             rng.uniform(-kPi, kPi));
}

}  // namespace pursuit::testing
