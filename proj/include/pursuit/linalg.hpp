#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace pursuit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using VecXc = Eigen::VectorXcd;
using MatXc = Eigen::MatrixXcd;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Dense circulant matrix from its first row: every row is the previous one
/// cyclically shifted right by one position.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
circulant(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& first_row) {
  const Eigen::Index n = first_row.size();
  if (n < 1) throw std::invalid_argument("circulant: empty first row");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      c(i, j) = first_row[(j - i + n) % n];
  return c;
}

/// Shift circulant L_m = circ[1, 0, ..., -1 (position m+1), ..., 0].
/// Row i carries +1 on the diagonal and -1 at column (i+m) mod n.
inline MatX shift_circulant(int n, int m) {
  if (n < 3) throw std::invalid_argument("shift_circulant: need n >= 3");
  if (m < 0 || m >= n) throw std::invalid_argument("shift_circulant: need 0 <= m < n");
  MatX l = MatX::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    l(i, i) += 1.0;
    l(i, (i + m) % n) -= 1.0;
  }
  return l;
}

/// Eigenvalues of circ[c_1 ... c_n] in DFT index order,
/// lambda_k = sum_p c_p e^{2 pi j (k-1)(p-1)/n} for k = 1..n.
inline VecXc circulant_eigenvalues(const VecXc& first_row) {
  const Eigen::Index n = first_row.size();
  VecXc lambda(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Complex acc(0.0, 0.0);
    for (Eigen::Index p = 0; p < n; ++p)
      acc += first_row[p] * std::exp(Complex(0.0, 2.0 * kPi * double(k) * double(p) / double(n)));
    lambda[k] = acc;
  }
  return lambda;
}

inline VecXc circulant_eigenvalues(const VecX& first_row) {
  return circulant_eigenvalues(VecXc(first_row.cast<Complex>()));
}

/// Unit eigenvector paired with circulant_eigenvalues(.)[k-1]; satisfies
/// C v_k = lambda_k v_k for every circulant C of size n.
inline VecXc circulant_eigenvector(int n, int k) {
  VecXc v(n);
  for (int i = 0; i < n; ++i)
    v[i] = std::exp(Complex(0.0, 2.0 * kPi * double(k - 1) * double(i) / double(n)));
  return v / std::sqrt(double(n));
}

/// Kronecker product [a_ij * B].
inline MatX kron(const MatX& a, const MatX& b) {
  MatX out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Counterclockwise rotation about e_z = (0,0,1).
inline Mat3 rotation_about_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r << c, -s, 0.0,
       s,  c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

inline Mat3 rotation_about_axis(const Vec3& axis, double angle) {
  const double nrm = axis.norm();
  if (nrm < 1e-12) throw std::invalid_argument("rotation_about_axis: zero axis");
  return Eigen::AngleAxisd(angle, axis / nrm).toRotationMatrix();
}

/// Shortest-arc rotation R with R * from = to (unit inputs).
inline Mat3 rotation_between(const Vec3& from, const Vec3& to) {
  return Eigen::Quaterniond::FromTwoVectors(from, to).toRotationMatrix();
}

inline bool is_rotation(const Mat3& r, double tol = 1e-9) {
  return (r.transpose() * r - Mat3::Identity()).norm() < tol &&
         std::abs(r.determinant() - 1.0) < tol;
}

/// Similarity transform R_eta^T R R_eta: same rotation angle about the
/// transported axis R_eta^T * axis(R).
inline Mat3 similarity_rotate(const Mat3& r_eta, const Mat3& r) {
  return r_eta.transpose() * r * r_eta;
}

/// Axis (eigenvector of eigenvalue 1) and angle in [0, pi] of a rotation.
inline std::pair<Vec3, double> rotation_axis_angle(const Mat3& r) {
  Eigen::AngleAxisd aa(r);
  return {aa.axis(), aa.angle()};
}

/// Member of the class C_{L (x) R_beta}: circulant part tensored with a
/// rotation about e_z. Eigenvalues are products of the factor eigenvalues.
struct BlockCirculant {
  VecXc circulant_first_row;
  double angle = 0.0;

  MatXc build() const {
    const Eigen::Index n = circulant_first_row.size();
    MatXc c = circulant<Complex>(circulant_first_row);
    MatXc r = rotation_about_z(angle).cast<Complex>();
    MatXc out(3 * n, 3 * n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        out.block(3 * i, 3 * j, 3, 3) = c(i, j) * r;
    return out;
  }

  /// 3n eigenvalues: lambda_i(L) * e^{j k angle} over i = 1..n, k in {-1,0,1}.
  VecXc eigenvalues() const {
    const Eigen::Index n = circulant_first_row.size();
    const VecXc lam = circulant_eigenvalues(circulant_first_row);
    VecXc out(3 * n);
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (int k = -1; k <= 1; ++k)
        out[at++] = lam[i] * std::exp(Complex(0.0, double(k) * angle));
    return out;
  }
};

}  // namespace pursuit
