#include "pursuit/extensions.hpp"

namespace pursuit {

std::pair<VecX, double> inter_robot_errors(const VecX& x, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("inter_robot_errors: rho must be positive");
  if (x.size() % 3 != 0 || x.size() < 9)
    throw std::invalid_argument("inter_robot_errors: bad state dimension");
  const int n = int(x.size() / 3);
  VecX p(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 edge = x.segment<3>(3 * ((i + 1) % n)) - x.segment<3>(3 * i);
    p[i] = 1.0 - edge.norm() / rho;
  }
  return {p, p.mean()};
}

VecX size_cyclic_control(const VecX& x, const CyclicParams& cyclic, const SizeParams& size,
                         double p_bar_delayed) {
  cyclic.validate();
  size.validate();
  for (int m = 1; m <= cyclic.horizon(); ++m)
    if (std::abs(cyclic.angles[m - 1] - double(m) * kPi / double(cyclic.n)) > 1e-12)
      throw std::invalid_argument("size_cyclic_control: base angles must be m pi / n");
  const double alpha_s = size.alpha_s0 * size.fs(p_bar_delayed);
  CyclicParams shifted = cyclic;
  shifted.angles = cyclic.angles.array() + alpha_s;
  return cyclic_control(x, shifted);
}

SizeConstants size_constants(int n, const VecX& gains, double alpha_s0, const SizeParams& size) {
  if (n < 3) throw std::invalid_argument("size_constants: need n >= 3");
  if (gains.size() < 1 || gains.size() > n - 2)
    throw std::invalid_argument("size_constants: bad horizon");
  SizeConstants c;
  c.beta = std::sqrt(2.0 * (1.0 - std::cos(2.0 * kPi / double(n))));
  const int N = int(gains.size());
  c.gammas.resize(N);
  for (int m = 1; m <= N; ++m)
    c.gammas[m - 1] = std::sin(double(m) * kPi / double(n)) / std::sin(kPi / double(n));
  c.Gamma = (gains.array() * c.gammas.array()).sum();
  const double gamma_max = (n % 2 == 0) ? 1.0 / std::sin(kPi / double(n))
                                        : 1.0 / (2.0 * std::sin(kPi / (2.0 * double(n))));
  c.Gamma_worst = c.beta * gamma_max * gains.sum();
  c.C = 2.0 * c.Gamma_worst;
  c.C_exact = 2.0 * c.beta * c.Gamma;

  // Sandwich constant T with (1/2) T |p| <= |sin(alpha_s0 fs(p))| <= T |p| on
  // |p| < 1. Exact for saturation; verified on a grid otherwise.
  if (size.shaping == ShapingFunction::Saturation) {
    c.T = alpha_s0;
  } else {
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 2000; ++i) {
      const double p = double(i) / 2000.0 * (1.0 - 1e-9);
      const double ratio = std::abs(std::sin(alpha_s0 * size.fs(p))) / p;
      hi = std::max(hi, ratio);
      lo = std::min(lo, ratio);
    }
    if (!(lo > 0.0) || lo < 0.5 * hi)
      throw std::invalid_argument(
          "size_constants: shaping function violates the sandwich property (b)");
    c.T = hi;
  }

  // Odd symmetry and positive slope at zero (properties (a) and (c)).
  for (double p : {0.1, 0.37, 0.9}) {
    if (std::abs(size.fs(p) + size.fs(-p)) > 1e-12)
      throw std::invalid_argument("size_constants: shaping function must be odd");
    if (std::abs(size.fs(p)) > 1.0 + 1e-12)
      throw std::invalid_argument("size_constants: |fs| must not exceed 1");
    if (!(p * size.fs(p) > 0.0))
      throw std::invalid_argument("size_constants: p * fs(p) must be positive");
  }
  if (!((size.fs(1e-6) - size.fs(-1e-6)) / 2e-6 > 0.0))
    throw std::invalid_argument("size_constants: fs'(0) must be positive");
  return c;
}

double tau_bound(const SizeConstants& c) {
  return std::min(1.0 / c.C, 1.0 / (8.0 * c.C * c.T));
}

Theorem5Report theorem5_certify(const CyclicParams& cyclic, const SizeParams& size,
                                int grid_points) {
  cyclic.validate();
  size.validate();
  Theorem5Report rep;
  rep.constants = size_constants(cyclic.n, cyclic.gains, size.alpha_s0, size);
  rep.tau = size.tau;
  rep.tau_limit = tau_bound(rep.constants);
  rep.tau_ok = size.tau < rep.tau_limit;
  if (std::abs(rep.constants.C - rep.constants.C_exact) >
      1e-12 * std::max(rep.constants.C, 1.0))
    rep.warnings.push_back("worst-case C differs from exact 2*beta*Gamma; tau bound uses the worst case");

  const int n = cyclic.n;
  double inf = std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid_points; ++g) {
    const double offset = -size.alpha_s0 +
                          2.0 * size.alpha_s0 * double(g) / double(grid_points - 1);
    bool in_domain = true;
    for (int m = 1; m <= cyclic.horizon(); ++m) {
      const double alpha = double(m) * kPi / double(n) + offset;
      if (alpha <= 0.0 || alpha >= kPi) in_domain = false;
    }
    if (!in_domain) {
      rep.warnings.push_back("perturbed angle interval leaves (0, pi); not certifiable");
      inf = -std::numeric_limits<double>::infinity();
      break;
    }
    for (int i = 1; i <= n; ++i)
      for (int k = -1; k <= 1; ++k) {
        if (theorem4_null_pair(n, i, k)) continue;
        double sum = 0.0;
        for (int m = 1; m <= cyclic.horizon(); ++m)
          sum += cyclic.gains[m - 1] *
                 theorem4_eigenvalue(n, m, double(m) * kPi / double(n) + offset, i, k);
        inf = std::min(inf, sum);
      }
  }
  rep.grid_infimum = inf;
  rep.eig_ok = inf > 1e-10;
  rep.certified = rep.eig_ok && rep.tau_ok;
  return rep;
}

VecX center_control(int n, const CenterParams& c, const Vec3& center_delayed) {
  c.validate();
  const Vec3 term = c.gain * (c.target - center_delayed);
  VecX u(3 * n);
  for (int i = 0; i < n; ++i) u.segment<3>(3 * i) = term;
  return u;
}

double rpf_value(double d, const CollisionParams& cp) {
  cp.validate();
  if (d <= cp.r1)
    throw std::domain_error("rpf_value: undefined at or below r1");
  if (d > cp.r2) return 0.0;
  const double w = cp.r2 - cp.r1;
  const double offset = 2.0 * w * std::log(w) - cp.r1;
  return w * w / (d - cp.r1) + 2.0 * w * std::log(d - cp.r1) - d - offset;
}

double rpf_force(double d, const CollisionParams& cp) {
  cp.validate();
  if (d <= cp.r1)
    throw std::domain_error("rpf_force: undefined at or below r1");
  if (d > cp.r2) return 0.0;
  return (d - cp.r2) * (d - cp.r2) / (d * (d - cp.r1) * (d - cp.r1));
}

CollisionControl collision_control(const VecX& x, const std::optional<VecX>& velocities,
                                   const CollisionParams& cp) {
  cp.validate();
  const int n = int(x.size() / 3);
  if (cp.variant == CollisionVariant::LosGated &&
      (!velocities || velocities->size() != x.size()))
    throw std::invalid_argument("collision_control: LOS variant requires velocities");
  if (cp.variant == CollisionVariant::TanhSoft && !(cp.rho > 0.0 && cp.k_coll > 0.0))
    throw std::invalid_argument("collision_control: tanh variant requires rho and k_coll");

  CollisionControl out;
  out.u = VecX::Zero(x.size());
  out.min_distance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec3 rel = x.segment<3>(3 * j) - x.segment<3>(3 * i);
      const double d = rel.norm();
      if (d < out.min_distance) {
        out.min_distance = d;
        out.closest = {i, j};
      }
      if (d <= cp.r1) {
        out.collided = true;
        continue;
      }
      double weight = 0.0;
      switch (cp.variant) {
        case CollisionVariant::HardRpf:
          weight = rpf_force(d, cp);
          break;
        case CollisionVariant::LosGated: {
          if (d > cp.r2) break;
          const Vec3 relv = velocities->segment<3>(3 * j) - velocities->segment<3>(3 * i);
          const double v_s = relv.dot(rel) / d;
          if (v_s < 0.0) weight = rpf_force(d, cp);
          break;
        }
        case CollisionVariant::TanhSoft:
          if (d <= cp.r2) weight = cp.k_coll * std::tanh(cp.rho - d);
          break;
      }
      if (weight != 0.0) {
        out.u.segment<3>(3 * i) -= weight * rel;
        out.u.segment<3>(3 * j) += weight * rel;
      }
    }
  return out;
}

double robustness_bound(const RobustnessModel& rm, double t) {
  if (rm.lambda == 0.0) throw std::invalid_argument("robustness_bound: lambda must be nonzero");
  const double rate = std::abs(rm.lambda);
  return rm.d_bar / rate * (1.0 - std::exp(-rate * t));
}

VecX robustness_ode_bound(const RobustnessModel& rm, const VecX& disturbance_norms, double dt) {
  if (rm.lambda == 0.0) throw std::invalid_argument("robustness_ode_bound: lambda must be nonzero");
  if (!(dt > 0.0)) throw std::invalid_argument("robustness_ode_bound: dt must be positive");
  const double rate = std::abs(rm.lambda);
  const double decay = std::exp(-rate * dt);
  VecX bound(disturbance_norms.size());
  double r = 0.0;
  for (Eigen::Index k = 0; k < disturbance_norms.size(); ++k) {
    bound[k] = r;
    r = r * decay + disturbance_norms[k] * (1.0 - decay) / rate;
  }
  return bound;
}

double rotational_alignment(const VecX& x, const SharedEdgeInfo& edge) {
  const Vec3 e = x.segment<3>(3 * edge.edge_head) - x.segment<3>(3 * edge.edge_tail);
  return e.dot(edge.q2_normal_rotation.transpose() * Vec3::UnitZ());
}

VecX rotational_q1_control(const VecX& x, const std::vector<int>& face1_ids,
                           const Mat3& face1_rotation, const SharedEdgeInfo& edge) {
  const int n1 = int(face1_ids.size());
  if (n1 < 3) throw std::invalid_argument("rotational_q1_control: face needs >= 3 robots");
  const double k_r = rotational_alignment(x, edge);
  VecX u = VecX::Zero(3 * n1);
  if (k_r == 0.0) return u;
  const bool forward = k_r > 0.0;
  const Mat3 r_rs = similarity_rotate(face1_rotation, rotation_about_z(kPi / double(n1)));
  for (int i = 0; i < n1; ++i) {
    const Vec3 xi = x.segment<3>(3 * face1_ids[i]);
    if (forward) {
      const Vec3 fwd = x.segment<3>(3 * face1_ids[(i + 1) % n1]) - xi;
      u.segment<3>(3 * i) = std::abs(k_r) * (r_rs * fwd);
    } else {
      const Vec3 rear = x.segment<3>(3 * face1_ids[(i - 1 + n1) % n1]) - xi;
      u.segment<3>(3 * i) = std::abs(k_r) * (r_rs.transpose() * rear);
    }
  }
  return u;
}

}  // namespace pursuit
