#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pursuit/subspace.hpp"

namespace pursuit {

/// Symmetric cyclic controller parameters: per-offset gains k_m > 0 and
/// rotation angles alpha_m about the plane normal, m = 1..N with N < n-1.
struct CyclicParams {
  int n = 0;
  VecX gains;   // length N, all > 0
  VecX angles;  // length N, radians
  Mat3 plane_rotation = Mat3::Identity();

  int horizon() const { return int(gains.size()); }

  void validate() const {
    if (n < 3) throw std::invalid_argument("CyclicParams: need n >= 3");
    const int N = horizon();
    if (N < 1 || N >= n - 1)
      throw std::invalid_argument("CyclicParams: need 0 < N < n-1");
    if (angles.size() != N)
      throw std::invalid_argument("CyclicParams: gains/angles length mismatch");
    for (int m = 0; m < N; ++m)
      if (!(gains[m] > 0.0))
        throw std::invalid_argument("CyclicParams: gains must be strictly positive");
    if (!is_rotation(plane_rotation))
      throw std::invalid_argument("CyclicParams: plane_rotation is not a rotation");
  }
};

/// Fixed-size angles alpha_m = m pi / n.
inline VecX fixed_size_angles(int n, int horizon) {
  VecX a(horizon);
  for (int m = 1; m <= horizon; ++m) a[m - 1] = double(m) * kPi / double(n);
  return a;
}

/// Internal robot dynamics g with a caller-supplied bound on
/// lambda_max(P_n (dg/dx) P_n^T); g = nullptr means zero dynamics.
struct InternalDynamics {
  std::function<VecX(const VecX&)> g;
  double jacobian_sup = 0.0;
};

/// Decentralized symmetric cyclic control,
/// u_i = sum_m k_m [R_ms (x_{i+m} - x_i) + R_ms^T (x_{i-m} - x_i)]
/// with R_ms = R_eta^T R(alpha_m) R_eta and indices modulo n.
inline VecX cyclic_control(const VecX& x, const CyclicParams& p) {
  p.validate();
  if (x.size() != 3 * p.n) throw std::invalid_argument("cyclic_control: state dimension mismatch");
  const int n = p.n;
  const int N = p.horizon();
  std::vector<Mat3> rot(N);
  for (int m = 0; m < N; ++m)
    rot[m] = similarity_rotate(p.plane_rotation, rotation_about_z(p.angles[m]));
  VecX u = VecX::Zero(3 * n);
  for (int i = 0; i < n; ++i) {
    const Vec3 xi = x.segment<3>(3 * i);
    Vec3 acc = Vec3::Zero();
    for (int m = 1; m <= N; ++m) {
      const Vec3 fwd = x.segment<3>(3 * ((i + m) % n)) - xi;
      const Vec3 rear = x.segment<3>(3 * (((i - m) % n + n) % n)) - xi;
      acc += p.gains[m - 1] * (rot[m - 1] * fwd + rot[m - 1].transpose() * rear);
    }
    u.segment<3>(3 * i) = acc;
  }
  return u;
}

/// Compact matrix form: L_eta = R_eta^T [ sum_m k_m (L_m (x) R_m + L_m^T (x) R_m^T) ] R_eta,
/// so that cyclic_control(x) == -L_eta x.
inline MatX assemble_L(const CyclicParams& p) {
  p.validate();
  const int n = p.n;
  MatX l = MatX::Zero(3 * n, 3 * n);
  for (int m = 1; m <= p.horizon(); ++m) {
    const MatX lm = shift_circulant(n, m);
    const Mat3 rm = rotation_about_z(p.angles[m - 1]);
    l += p.gains[m - 1] * (kron(lm, rm) + kron(lm.transpose(), rm.transpose()));
  }
  const MatX reta = kron(MatX::Identity(n, n), p.plane_rotation);
  return reta.transpose() * l * reta;
}

/// Closed-form eigenvalue lambda^(m)_{ik} of P_n L_m P_n^T, exactly as the
/// convergence theorem prints it (complex form); i is 1-based.
inline Complex theorem4_eigenvalue_raw(int n, int m, double alpha, int i, int k) {
  const auto cx = [&](double num) { return std::exp(Complex(0.0, 2.0 * kPi * num / double(n))); };
  const Complex denom = cx(double(2 * (i - 1) + k));
  const double cosdiff =
      std::cos(double(k) * alpha) -
      std::cos(double(k) * alpha + 2.0 * kPi * double(m) * double(i - 1) / double(n));
  const Complex bracket = (cx(double(i - 1 + k)) - 1.0) * (cx(double(i - 1)) - 1.0);
  return (2.0 / denom) * cosdiff * bracket * bracket;
}

/// Real value of lambda^(m)_{ik}; throws if the printed expression evaluates
/// away from the real axis (internal consistency error).
inline double theorem4_eigenvalue(int n, int m, double alpha, int i, int k) {
  const Complex v = theorem4_eigenvalue_raw(n, m, alpha, i, k);
  if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v.real())))
    throw std::runtime_error("theorem4_eigenvalue: non-real eigenvalue from closed form");
  return v.real();
}

/// The (i, k) pairs whose eigenvectors span the polygon subspace itself
/// (three translations, scaling, in-plane rotation). Their eigenvalues are
/// structurally zero and are excluded from convergence margins.
inline bool theorem4_null_pair(int n, int i, int k) {
  if (i == 1) return true;                 // translations
  if (i == 2 && k == -1) return true;      // scaling / rotation pair
  if (i == n && k == 1) return true;
  return false;
}

struct Theorem4Report {
  double closed_form_margin = 0.0;  // min over transverse (i,k) of sum_m k_m lambda^(m)_{ik}
  double numeric_margin = 0.0;      // same quantity from a dense eigendecomposition
  double margin = 0.0;              // certified margin minus jacobian_sup (numeric wins on mismatch)
  double jacobian_sup = 0.0;
  bool certified = false;
  std::vector<std::string> warnings;
};

/// Convergence certificate for the symmetric cyclic controller: positive
/// margin means global exponential convergence to the polygon subspace.
/// The closed form is cross-checked against a dense eigendecomposition of
/// sym(P_n L P_n^T) restricted transverse to the subspace; on disagreement
/// beyond 1e-6 relative the numeric value wins and a warning is attached.
inline Theorem4Report theorem4_margin(const CyclicParams& p, const InternalDynamics& dyn = {}) {
  p.validate();
  for (int m = 0; m < p.horizon(); ++m)
    if (p.angles[m] <= 0.0 || p.angles[m] >= kPi)
      throw std::invalid_argument("theorem4_margin: angles must lie in (0, pi)");
  const int n = p.n;

  Theorem4Report rep;
  rep.jacobian_sup = dyn.jacobian_sup;

  double closed = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= n; ++i)
    for (int k = -1; k <= 1; ++k) {
      if (theorem4_null_pair(n, i, k)) continue;
      double sum = 0.0;
      for (int m = 1; m <= p.horizon(); ++m)
        sum += p.gains[m - 1] * theorem4_eigenvalue(n, m, p.angles[m - 1], i, k);
      closed = std::min(closed, sum);
    }
  rep.closed_form_margin = closed;

  // Numeric route on the same inner matrix (orientation drops out).
  CyclicParams aligned = p;
  aligned.plane_rotation = Mat3::Identity();
  const MatX pn = polygon_projector(n);
  const MatX inner = pn * assemble_L(aligned) * pn.transpose();
  const MatX sym = 0.5 * (inner + inner.transpose());
  const ConstraintMatrix cm = build_polygon_V({n, Mat3::Identity()});
  Eigen::SelfAdjointEigenSolver<MatX> es(cm.Vbar * sym * cm.Vbar.transpose());
  rep.numeric_margin = es.eigenvalues().minCoeff();

  const double scale = std::max({1.0, std::abs(rep.closed_form_margin), std::abs(rep.numeric_margin)});
  double used = rep.closed_form_margin;
  if (std::abs(rep.closed_form_margin - rep.numeric_margin) > 1e-6 * scale) {
    used = rep.numeric_margin;
    rep.warnings.push_back("closed-form eigenvalue minimum disagrees with dense eigendecomposition; using numeric value");
  }
  rep.margin = used - dyn.jacobian_sup;
  rep.certified = rep.margin > 1e-10;
  return rep;
}

/// Contraction rate Lambda magnitude: lambda_min of sym(Vbar L Vbar^T).
/// Governs the exponential decay of ||Vbar x|| and the robustness bound.
inline double contraction_rate(const ConstraintMatrix& cm, const MatX& l) {
  const MatX projected = cm.Vbar * l * cm.Vbar.transpose();
  const MatX sym = 0.5 * (projected + projected.transpose());
  Eigen::SelfAdjointEigenSolver<MatX> es(sym);
  return es.eigenvalues().minCoeff();
}

}  // namespace pursuit
