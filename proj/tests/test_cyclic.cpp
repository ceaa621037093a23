#include <doctest.h>

#include "pursuit/cyclic.hpp"
#include "test_helpers.hpp"

using namespace pursuit;
using namespace pursuit::testing;

namespace {

CyclicParams hexagon_n2_k2() {
  CyclicParams p;
  p.n = 6;
  p.gains = VecX::Constant(2, 2.0);
  p.angles = fixed_size_angles(6, 2);
  return p;
}

CyclicParams hexagon_n1_k6928() {
  CyclicParams p;
  p.n = 6;
  p.gains = VecX::Constant(1, 6.928);
  p.angles = fixed_size_angles(6, 1);
  return p;
}

}  // namespace

TEST_CASE("cyclic control vanishes on the target polygon and on coincident robots") {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 4 + int(rng.next_u64() % 5);
    const Mat3 r_eta = random_rotation(rng);
    CyclicParams p;
    p.n = n;
    p.gains = VecX::Constant(2, rng.uniform(0.5, 3.0));
    p.angles = fixed_size_angles(n, 2);
    p.plane_rotation = r_eta;
    const VecX x = regular_polygon(n, Vec3(1, 2, -1), rng.uniform(0.5, 2.0),
                                   rng.uniform(0, 2 * kPi), r_eta);
    CHECK(cyclic_control(x, p).norm() < 1e-10 * x.norm());

    VecX coincident(3 * n);
    for (int i = 0; i < n; ++i) coincident.segment<3>(3 * i) = Vec3(0.3, -0.1, 2.0);
    CHECK(cyclic_control(coincident, p).norm() < 1e-14);
  }
}

TEST_CASE("per-robot law equals the assembled matrix form") {
  Rng rng(43);
  CyclicParams p = hexagon_n2_k2();
  p.plane_rotation = random_rotation(rng);
  const MatX l = assemble_L(p);
  for (int trial = 0; trial < 10; ++trial) {
    const VecX x = random_vector(rng, 18, -3.0, 3.0);
    CHECK((cyclic_control(x, p) + l * x).norm() < 1e-12 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("assembled matrix structure") {
  // N=1, k=1, alpha=0 reduces to the cycle graph Laplacian tensor I_3.
  CyclicParams p;
  p.n = 3;
  p.gains = VecX::Constant(1, 1.0);
  p.angles = VecX::Zero(1);
  const MatX l = assemble_L(p);
  const MatX l1 = shift_circulant(3, 1);
  CHECK((l - kron(MatX(l1 + l1.transpose()), Mat3::Identity())).norm() < 1e-14);
  CHECK((l - l.transpose()).norm() < 1e-14);

  // Block row sums vanish: translations are uncontrolled.
  CyclicParams q = hexagon_n2_k2();
  const MatX lq = assemble_L(q);
  Rng rng(47);
  const Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  VecX ones(18);
  for (int i = 0; i < 6; ++i) ones.segment<3>(3 * i) = v;
  CHECK((lq * ones).norm() < 1e-12);
}

TEST_CASE("flow invariance: the cyclic law maps the subspace into itself") {
  Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + int(rng.next_u64() % 4);
    const Mat3 r_eta = random_rotation(rng);
    const PolygonSpec spec{n, r_eta};
    const ConstraintMatrix cm = build_polygon_V(spec);
    CyclicParams p;
    p.n = n;
    p.gains = VecX::Constant(1, rng.uniform(0.5, 2.0));
    p.angles = VecX::Constant(1, rng.uniform(0.1, kPi - 0.1));  // any angle, not only m pi/n
    p.plane_rotation = r_eta;
    const MatX l = assemble_L(p);
    const VecX x = polygon_subspace_basis(spec) * random_vector(rng, 5, -2.0, 2.0);
    const VecX u = -l * x;
    CHECK((cm.Vbar * u).norm() <= 1e-9 * std::max(1e-12, u.norm()));
  }
}

TEST_CASE("theorem 4 closed form matches dense eigendecomposition across n and m") {
  for (int n = 3; n <= 8; ++n)
    for (int m = 1; m <= 2; ++m) {
      for (double alpha : {double(m) * kPi / double(n), 0.3}) {
        const MatX pn = polygon_projector(n);
        const MatX lm = kron(shift_circulant(n, m), rotation_about_z(alpha)) +
                        kron(shift_circulant(n, m).transpose(), rotation_about_z(-alpha));
        const MatX inner = pn * lm * pn.transpose();
        Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (inner + inner.transpose()));
        VecX closed(3 * n);
        int at = 0;
        for (int i = 1; i <= n; ++i)
          for (int k = -1; k <= 1; ++k) closed[at++] = theorem4_eigenvalue(n, m, alpha, i, k);
        const double scale = std::max(1.0, closed.cwiseAbs().maxCoeff());
        CHECK(multiset_distance(closed, VecX(es.eigenvalues())) < 1e-8 * scale);
      }
    }
}

TEST_CASE("theorem 4 margin certifies the Fig. 1 configuration") {
  const Theorem4Report rep = theorem4_margin(hexagon_n2_k2());
  CHECK(rep.certified);
  CHECK(rep.margin > 0.0);
  CHECK(rep.warnings.empty());
  CHECK(rep.closed_form_margin ==
        doctest::Approx(rep.numeric_margin).epsilon(1e-9));
}

TEST_CASE("theorem 4 margin scales linearly in the gains") {
  CyclicParams p = hexagon_n2_k2();
  const double base = theorem4_margin(p).margin;
  p.gains *= 3.0;
  CHECK(theorem4_margin(p).margin == doctest::Approx(3.0 * base).epsilon(1e-9));
}

TEST_CASE("internal dynamics bound shifts the margin") {
  const double free_margin = theorem4_margin(hexagon_n2_k2()).margin;
  InternalDynamics dyn;
  dyn.jacobian_sup = free_margin + 1.0;
  const Theorem4Report rep = theorem4_margin(hexagon_n2_k2(), dyn);
  CHECK(rep.margin == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(!rep.certified);
}

TEST_CASE("contraction rate reproduces the published 6.928 for both tunings") {
  const ConstraintMatrix cm = build_polygon_V({6, Mat3::Identity()});
  CHECK(contraction_rate(cm, assemble_L(hexagon_n2_k2())) == doctest::Approx(6.928).epsilon(0.0015));
  CHECK(contraction_rate(cm, assemble_L(hexagon_n1_k6928())) ==
        doctest::Approx(6.928).epsilon(0.0015));
}

TEST_CASE("contraction rate is linear in the gains") {
  const ConstraintMatrix cm = build_polygon_V({6, Mat3::Identity()});
  CyclicParams p = hexagon_n2_k2();
  const double rate = contraction_rate(cm, assemble_L(p));
  p.gains *= 2.0;
  CHECK(contraction_rate(cm, assemble_L(p)) == doctest::Approx(2.0 * rate).epsilon(1e-10));
}

TEST_CASE("expansion and contraction trichotomy about m pi / n") {
  const int n = 6;
  const VecX x = regular_polygon(n, Vec3::Zero(), 1.5, 0.4);
  const Vec3 centroid = Vec3::Zero();
  auto radius_rate = [&](double offset) {
    CyclicParams p;
    p.n = n;
    p.gains = VecX::Constant(1, 1.0);
    p.angles = VecX::Constant(1, kPi / double(n) + offset);
    const VecX u = cyclic_control(x, p);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const Vec3 xi = x.segment<3>(3 * i) - centroid;
      worst = std::max(worst, std::abs(xi.normalized().dot(u.segment<3>(3 * i))));
    }
    // All radial rates are equal by symmetry; return the signed value.
    const Vec3 x0 = x.segment<3>(0) - centroid;
    return x0.normalized().dot(u.segment<3>(0));
  };
  CHECK(radius_rate(-0.1) < -1e-3);
  CHECK(std::abs(radius_rate(0.0)) < 1e-12);
  CHECK(radius_rate(0.1) > 1e-3);
}

TEST_CASE("parameter validation") {
  CyclicParams p = hexagon_n2_k2();
  p.gains[0] = -1.0;
  CHECK_THROWS_AS(cyclic_control(VecX::Zero(18), p), std::invalid_argument);
  p = hexagon_n2_k2();
  CHECK_THROWS_AS(cyclic_control(VecX::Zero(17), p), std::invalid_argument);
  p.gains = VecX::Constant(5, 1.0);  // N must stay below n-1
  p.angles = fixed_size_angles(6, 5);
  CHECK_THROWS_AS(cyclic_control(VecX::Zero(18), p), std::invalid_argument);
  p = hexagon_n2_k2();
  p.angles[0] = -0.1;
  CHECK_THROWS_AS(theorem4_margin(p), std::invalid_argument);
}
