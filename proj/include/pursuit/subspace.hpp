#pragma once

#include <stdexcept>

#include "pursuit/linalg.hpp"

namespace pursuit {

/// Target regular polygon: n robots, plane rotation R_eta chosen so that
/// R_eta^T e_z is the polygon normal.
struct PolygonSpec {
  int n = 0;
  Mat3 plane_rotation = Mat3::Identity();
};

/// Constraint matrix V whose null space is the formation subspace, together
/// with a row-orthonormal counterpart Vbar (same null space) and Ubar, an
/// orthonormal basis of the complement. Satisfies Vbar Vbar^T = I and
/// Vbar^T Vbar + Ubar^T Ubar = I.
struct ConstraintMatrix {
  MatX V;
  MatX Vbar;
  MatX Ubar;
  Eigen::Index rank = 0;

  Eigen::Index state_dim() const { return V.cols(); }
};

struct Orthonormalized {
  MatX Vbar;
  MatX Ubar;
  Eigen::Index rank = 0;
};

/// Row-space-preserving orthonormalization of a full-row-rank V via SVD.
/// Rank decisions use the fixed threshold 1e-10 * sigma_max.
inline Orthonormalized orthonormalize(const MatX& v) {
  Eigen::JacobiSVD<MatX> svd(v, Eigen::ComputeFullV);
  const VecX sigma = svd.singularValues();
  const double tol = 1e-10 * (sigma.size() > 0 ? sigma[0] : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma[i] > tol) ++rank;
  if (rank < v.rows())
    throw std::runtime_error("orthonormalize: constraint matrix is rank deficient (" +
                             std::to_string(rank) + " < " + std::to_string(v.rows()) + " rows)");
  const MatX w = svd.matrixV();
  Orthonormalized out;
  out.Vbar = w.leftCols(rank).transpose();
  out.Ubar = w.rightCols(v.cols() - rank).transpose();
  out.rank = rank;
  return out;
}

/// Selector W_n stacking the rotational rows [W_r (x) I_3] over the single
/// in-plane row [W_p (x) e_z^T]; size (3(n-2)+1) x 3n.
inline MatX polygon_selector(int n) {
  if (n < 3) throw std::invalid_argument("polygon_selector: need n >= 3");
  MatX w = MatX::Zero(3 * (n - 2) + 1, 3 * n);
  w.topLeftCorner(3 * (n - 2), 3 * (n - 2)).setIdentity();
  w(3 * (n - 2), 3 * (n - 2) + 2) = 1.0;  // e_z^T of block n-1
  return w;
}

/// P_n = L_1 (x) I_3 + (L_1 - L_2) (x) R_{2 pi / n}; its null space is the
/// e_z-aligned polygon subspace.
inline MatX polygon_projector(int n) {
  if (n < 3) throw std::invalid_argument("polygon_projector: need n >= 3");
  const MatX l1 = shift_circulant(n, 1);
  const MatX l2 = shift_circulant(n, 2);
  return kron(l1, Mat3::Identity()) + kron(l1 - l2, rotation_about_z(2.0 * kPi / n));
}

/// V = W_n P_n R_eta with R_eta = I_n (x) plane_rotation; 3n-5 rows,
/// full row rank, null space = the regular-polygon subspace.
inline ConstraintMatrix build_polygon_V(const PolygonSpec& spec) {
  if (spec.n < 3) throw std::invalid_argument("build_polygon_V: need n >= 3");
  if (!is_rotation(spec.plane_rotation))
    throw std::invalid_argument("build_polygon_V: plane_rotation is not a rotation");
  MatX v = polygon_selector(spec.n) * polygon_projector(spec.n) *
           kron(MatX::Identity(spec.n, spec.n), spec.plane_rotation);
  ConstraintMatrix cm;
  cm.V = std::move(v);
  Orthonormalized orth = orthonormalize(cm.V);
  cm.Vbar = std::move(orth.Vbar);
  cm.Ubar = std::move(orth.Ubar);
  cm.rank = orth.rank;
  return cm;
}

/// Formation error ||Vbar x||: zero exactly on the formation subspace.
inline double formation_error(const ConstraintMatrix& cm, const VecX& x) {
  if (x.size() != cm.state_dim())
    throw std::invalid_argument("formation_error: state dimension mismatch");
  return (cm.Vbar * x).norm();
}

inline bool is_on_subspace(const ConstraintMatrix& cm, const VecX& x, double tol) {
  return formation_error(cm, x) <= tol;
}

/// Stacked state of a regular n-gon with normal R_eta^T e_z. The winding is
/// chosen so the state satisfies the rotational constraints: successive
/// vertices advance clockwise about the normal.
inline VecX regular_polygon(int n, const Vec3& center, double circumradius, double phase,
                            const Mat3& plane_rotation = Mat3::Identity()) {
  if (n < 3) throw std::invalid_argument("regular_polygon: need n >= 3");
  VecX x(3 * n);
  for (int i = 0; i < n; ++i) {
    const double theta = phase - 2.0 * kPi * double(i) / double(n);
    const Vec3 local(circumradius * std::cos(theta), circumradius * std::sin(theta), 0.0);
    x.segment<3>(3 * i) = center + plane_rotation.transpose() * local;
  }
  return x;
}

/// 3n x 5 basis of the polygon subspace: three translations, scaling, and
/// in-plane rotation. Columns are orthonormal.
inline MatX polygon_subspace_basis(const PolygonSpec& spec) {
  const int n = spec.n;
  MatX basis(3 * n, 5);
  const Mat3 r_eta_t = spec.plane_rotation.transpose();
  for (int i = 0; i < n; ++i) {
    const double theta = -2.0 * kPi * double(i) / double(n);
    basis.block<3, 1>(3 * i, 0) = Vec3::UnitX();
    basis.block<3, 1>(3 * i, 1) = Vec3::UnitY();
    basis.block<3, 1>(3 * i, 2) = Vec3::UnitZ();
    basis.block<3, 1>(3 * i, 3) = r_eta_t * Vec3(std::cos(theta), std::sin(theta), 0.0);
    basis.block<3, 1>(3 * i, 4) = r_eta_t * Vec3(-std::sin(theta), std::cos(theta), 0.0);
  }
  basis /= std::sqrt(double(n));
  return basis;
}

}  // namespace pursuit
