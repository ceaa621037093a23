#include <doctest.h>

#include "pursuit/linalg.hpp"
#include "test_helpers.hpp"

using namespace pursuit;
using namespace pursuit::testing;

namespace {

VecXc dense_eigenvalues(const MatX& m) {
  Eigen::EigenSolver<MatX> es(m);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("shift circulant structure") {
  CHECK(shift_circulant(3, 0).norm() == doctest::Approx(0.0));  // L_0 = I - I

  const MatX l1 = shift_circulant(3, 1);
  MatX expected(3, 3);
  expected << 1, -1, 0, 0, 1, -1, -1, 0, 1;
  CHECK((l1 - expected).norm() == doctest::Approx(0.0));

  const MatX l2 = shift_circulant(5, 2);
  for (int i = 0; i < 5; ++i) {
    CHECK(l2.row(i).sum() == doctest::Approx(0.0));
    CHECK(l2.row(i).maxCoeff() == doctest::Approx(1.0));
    CHECK(l2.row(i).minCoeff() == doctest::Approx(-1.0));
    CHECK(l2.row(i).cwiseAbs().sum() == doctest::Approx(2.0));
  }

  CHECK_THROWS_AS(shift_circulant(5, 5), std::invalid_argument);
  CHECK_THROWS_AS(shift_circulant(5, -1), std::invalid_argument);
  CHECK_THROWS_AS(shift_circulant(2, 1), std::invalid_argument);
}

TEST_CASE("circulant eigenvalues match the dense eigendecomposition") {
  // L_1 with n = 4: {0, 1-j, 2, 1+j} up to ordering.
  VecX row(4);
  row << 1, -1, 0, 0;
  const VecXc lam = circulant_eigenvalues(row);
  VecXc expected(4);
  expected << Complex(0, 0), Complex(1, -1), Complex(2, 0), Complex(1, 1);
  CHECK(multiset_distance(lam, expected) < 1e-12);
  CHECK(multiset_distance(lam, dense_eigenvalues(circulant<double>(row))) < 1e-9);

  // circ[c, 0, ..., 0] = c I.
  VecX scal = VecX::Zero(6);
  scal[0] = 2.5;
  const VecXc lam_scal = circulant_eigenvalues(scal);
  for (int k = 0; k < 6; ++k) CHECK(std::abs(lam_scal[k] - Complex(2.5, 0)) < 1e-14);

  // L_1 with n = 6 against 1 - e^{2 pi (i-1) j / 6}.
  VecX row6 = VecX::Zero(6);
  row6[0] = 1;
  row6[1] = -1;
  const VecXc lam6 = circulant_eigenvalues(row6);
  for (int i = 1; i <= 6; ++i) {
    const Complex want = 1.0 - std::exp(Complex(0, 2.0 * kPi * (i - 1) / 6.0));
    CHECK(std::abs(lam6[i - 1] - want) < 1e-12);
  }
  CHECK(multiset_distance(lam6, dense_eigenvalues(circulant<double>(row6))) < 1e-9);
}

TEST_CASE("circulant eigenpairs satisfy C v = lambda v in index order") {
  Rng rng(7);
  const int n = 7;
  const VecX row = random_vector(rng, n);
  const MatX c = circulant<double>(row);
  const VecXc lam = circulant_eigenvalues(row);
  for (int k = 1; k <= n; ++k) {
    const VecXc v = circulant_eigenvector(n, k);
    CHECK((c.cast<Complex>() * v - lam[k - 1] * v).norm() < 1e-12);
  }
}

TEST_CASE("closed-form circulant spectra survive random first rows") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + int(rng.next_u64() % 9);
    const VecX row = random_vector(rng, n);
    const VecXc lam = circulant_eigenvalues(row);
    const VecXc dense = dense_eigenvalues(circulant<double>(row));
    CHECK(multiset_distance(lam, dense) < 1e-9 * std::max(1.0, double(lam.cwiseAbs().maxCoeff())));
  }
}

TEST_CASE("products and sums of circulants are circulant") {
  Rng rng(3);
  const int n = 6;
  const VecX a = random_vector(rng, n);
  const VecX b = random_vector(rng, n);
  const MatX ca = circulant<double>(a);
  const MatX cb = circulant<double>(b);
  for (const MatX& m : {MatX(ca * cb), MatX(ca + cb)}) {
    const MatX regenerated = circulant<double>(VecX(m.row(0).transpose()));
    CHECK((m - regenerated).norm() < 1e-12);
  }
  CHECK((ca * cb - cb * ca).norm() < 1e-12);  // circulants commute
}

TEST_CASE("kron basics and mixed-product identity") {
  CHECK((kron(MatX::Identity(2, 2), MatX::Identity(3, 3)) - MatX::Identity(6, 6)).norm() == 0.0);

  Rng rng(11);
  const MatX a = random_matrix(rng, 2, 2), b = random_matrix(rng, 2, 2);
  const MatX c = random_matrix(rng, 2, 2), d = random_matrix(rng, 2, 2);
  CHECK((kron(a, b) * kron(c, d) - kron(MatX(a * c), MatX(b * d))).norm() < 1e-12);
}

TEST_CASE("kron eigenvalues are products of factor eigenvalues") {
  Rng rng(5);
  const MatX a = random_matrix(rng, 3, 3), b = random_matrix(rng, 3, 3);
  const VecXc ea = dense_eigenvalues(a), eb = dense_eigenvalues(b);
  VecXc products(9);
  int at = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) products[at++] = ea[i] * eb[j];
  CHECK(multiset_distance(products, dense_eigenvalues(kron(a, b))) < 1e-8);
}

TEST_CASE("rotations about z") {
  CHECK((rotation_about_z(0.0) - Mat3::Identity()).norm() == doctest::Approx(0.0));
  Mat3 flip = Mat3::Identity();
  flip(0, 0) = flip(1, 1) = -1.0;
  CHECK((rotation_about_z(kPi) - flip).norm() < 1e-15);

  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = rng.uniform(-3, 3), b = rng.uniform(-3, 3);
    CHECK((rotation_about_z(a) * rotation_about_z(b) - rotation_about_z(a + b)).norm() < 1e-14);
  }
}

TEST_CASE("similarity rotation preserves angle and transports the axis") {
  Rng rng(13);
  const Mat3 r = rotation_about_z(0.7);
  CHECK((similarity_rotate(Mat3::Identity(), r) - r).norm() == 0.0);

  for (int trial = 0; trial < 10; ++trial) {
    const Mat3 r_eta = random_rotation(rng);
    const Mat3 rot = rotation_about_axis(Vec3::UnitZ(), rng.uniform(0.1, 3.0));
    const Mat3 s = similarity_rotate(r_eta, rot);
    CHECK(s.trace() == doctest::Approx(rot.trace()).epsilon(1e-12));
    const auto [axis, angle] = rotation_axis_angle(s);
    const Vec3 expected = r_eta.transpose() * Vec3::UnitZ();
    CHECK(std::min((axis - expected).norm(), (axis + expected).norm()) < 1e-9);
  }
}

TEST_CASE("block circulant eigenvalues are outer products") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3 + int(rng.next_u64() % 5);
    BlockCirculant bc{random_vector(rng, n).cast<Complex>(), rng.uniform(-2.0, 2.0)};
    const MatXc m = bc.build();
    Eigen::ComplexEigenSolver<MatXc> es(m);
    CHECK(multiset_distance(bc.eigenvalues(), VecXc(es.eigenvalues())) < 1e-8);
  }
}
