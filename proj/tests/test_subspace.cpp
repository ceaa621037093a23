#include <doctest.h>

#include "pursuit/subspace.hpp"
#include "test_helpers.hpp"

using namespace pursuit;
using namespace pursuit::testing;

TEST_CASE("unit square in the z=0 plane satisfies its own constraints") {
  const ConstraintMatrix cm = build_polygon_V({4, Mat3::Identity()});
  const VecX x = regular_polygon(4, Vec3::Zero(), std::sqrt(0.5), 0.3);
  CHECK((cm.V * x).norm() < 1e-12);
  CHECK(formation_error(cm, x) < 1e-12);
}

TEST_CASE("row structure and rank of the polygon constraint matrix") {
  for (int n : {3, 4, 6, 9}) {
    const ConstraintMatrix cm = build_polygon_V({n, Mat3::Identity()});
    CHECK(cm.V.rows() == 3 * (n - 2) + 1);
    CHECK(cm.V.cols() == 3 * n);
    CHECK(cm.rank == 3 * n - 5);
    Eigen::JacobiSVD<MatX> svd(cm.V);
    int numeric_rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++numeric_rank;
    CHECK(numeric_rank == 3 * n - 5);
  }
}

TEST_CASE("spiral satisfies rotational rows only; the in-plane row rejects it") {
  // Equal z-increments per step with in-plane regular-polygon geometry.
  const int n = 5;
  const ConstraintMatrix cm = build_polygon_V({n, Mat3::Identity()});
  VecX x = regular_polygon(n, Vec3::Zero(), 1.0, 0.0);
  // A spiral: x_{i+1} - x_i all share the same z-increment except the
  // wrap-around edge, which drops by (n-1) increments. The rotational
  // constraints involve edges 1..n-1 and see equal increments; the in-plane
  // row compares the wrap-around edge and is violated.
  for (int i = 0; i < n; ++i) x[3 * i + 2] += 0.2 * double(i);
  const MatX rot_rows = cm.V.topRows(3 * (n - 2));
  const MatX plane_row = cm.V.bottomRows(1);
  CHECK((rot_rows * x).norm() < 1e-12);
  CHECK(std::abs((plane_row * x)(0, 0)) > 1e-3);
  CHECK(formation_error(cm, x) > 1e-3);
}

TEST_CASE("orthonormalization contract") {
  Rng rng(17);
  const MatX v = random_matrix(rng, 5, 12);
  const Orthonormalized orth = orthonormalize(v);
  CHECK((orth.Vbar * orth.Vbar.transpose() - MatX::Identity(5, 5)).norm() < 1e-12);
  CHECK((orth.Vbar.transpose() * orth.Vbar + orth.Ubar.transpose() * orth.Ubar -
         MatX::Identity(12, 12))
            .norm() < 1e-12);
  // Same row space: mutual projection preserves each matrix.
  const MatX proj = orth.Vbar.transpose() * orth.Vbar;
  CHECK((v * proj - v).norm() < 1e-10);

  // Already-orthonormal rows stay a basis of the same space.
  const Orthonormalized again = orthonormalize(orth.Vbar);
  CHECK((again.Vbar * again.Vbar.transpose() - MatX::Identity(5, 5)).norm() < 1e-12);
  CHECK((orth.Vbar * again.Vbar.transpose() * again.Vbar - orth.Vbar).norm() < 1e-10);

  // Rank-deficient input is a structural error.
  MatX bad(3, 6);
  bad.row(0) = random_vector(rng, 6);
  bad.row(1) = 2.0 * bad.row(0);
  bad.row(2) = random_vector(rng, 6);
  CHECK_THROWS_AS(orthonormalize(bad), std::runtime_error);
}

TEST_CASE("completeness identity for the hexagon") {
  const ConstraintMatrix cm = build_polygon_V({6, Mat3::Identity()});
  CHECK((cm.Vbar.transpose() * cm.Vbar + cm.Ubar.transpose() * cm.Ubar -
         MatX::Identity(18, 18))
            .norm() < 1e-12);
}

TEST_CASE("formation error invariances") {
  const ConstraintMatrix cm = build_polygon_V({6, Mat3::Identity()});
  const VecX hexagon = regular_polygon(6, Vec3(0.3, -0.2, 1.0), 2.0, 0.8);
  CHECK(formation_error(cm, hexagon) < 1e-12);
  CHECK(is_on_subspace(cm, hexagon, 1e-9));

  Rng rng(23);
  VecX x = random_vector(rng, 18);
  const double base = formation_error(cm, x);
  VecX shifted = x;
  const Vec3 t(0.4, -1.2, 0.7);
  for (int i = 0; i < 6; ++i) shifted.segment<3>(3 * i) += t;
  CHECK(formation_error(cm, shifted) == doctest::Approx(base).epsilon(1e-10));

  for (double alpha : {0.2, 1.0, -3.5})
    CHECK(formation_error(cm, VecX(alpha * hexagon)) < 1e-10);

  CHECK_THROWS_AS(formation_error(cm, VecX(VecX::Zero(17))), std::invalid_argument);
}

TEST_CASE("nullity is five and the analytic basis spans it") {
  Rng rng(29);
  for (int n : {4, 6, 7}) {
    const Mat3 r_eta = random_rotation(rng);
    const PolygonSpec spec{n, r_eta};
    const ConstraintMatrix cm = build_polygon_V(spec);
    CHECK(cm.Ubar.rows() == 5);
    const MatX basis = polygon_subspace_basis(spec);
    CHECK((cm.V * basis).norm() < 1e-9);
    // Random on-subspace states have zero error.
    for (int trial = 0; trial < 5; ++trial) {
      const VecX x = basis * random_vector(rng, 5, -3.0, 3.0);
      CHECK(formation_error(cm, x) < 1e-9);
    }
  }
}

TEST_CASE("orientation equivariance of the constraint matrix") {
  Rng rng(31);
  const int n = 6;
  const Mat3 r_eta = random_rotation(rng);
  const ConstraintMatrix aligned = build_polygon_V({n, Mat3::Identity()});
  const ConstraintMatrix rotated = build_polygon_V({n, r_eta});
  const MatX reta = kron(MatX::Identity(n, n), r_eta);
  for (int trial = 0; trial < 5; ++trial) {
    const VecX x = random_vector(rng, 3 * n);
    CHECK((rotated.V * (reta.transpose() * x)).norm() ==
          doctest::Approx((aligned.V * x).norm()).epsilon(1e-10));
  }
}

TEST_CASE("rotated regular polygons satisfy the rotated constraints") {
  Rng rng(37);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 3 + int(rng.next_u64() % 6);
    const Mat3 r_eta = random_rotation(rng);
    const ConstraintMatrix cm = build_polygon_V({n, r_eta});
    const VecX x = regular_polygon(n, Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)),
                                   rng.uniform(0.2, 4.0), rng.uniform(0, 2 * kPi), r_eta);
    CHECK(formation_error(cm, x) < 1e-10);
  }
}
