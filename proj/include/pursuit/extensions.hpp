#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/cyclic.hpp"

namespace pursuit {

enum class ShapingFunction { Tanh, Saturation, Custom };

/// Hybrid size-control parameters. The shaping function must be odd, bounded
/// by 1 in magnitude, and have positive slope at zero; the rotation-angle
/// offset applied during [k tau, (k+1) tau) is alpha_s0 * fs(p_bar((k-1) tau)).
struct SizeParams {
  double rho = 1.0;       // desired side length
  double alpha_s0 = 0.0;  // angle gain, radians
  ShapingFunction shaping = ShapingFunction::Tanh;
  std::function<double(double)> custom_fs;  // used when shaping == Custom
  double tau = 0.1;       // time lag, seconds

  double fs(double p) const {
    switch (shaping) {
      case ShapingFunction::Tanh: return std::tanh(p);
      case ShapingFunction::Saturation: return std::clamp(p, -1.0, 1.0);
      case ShapingFunction::Custom: return custom_fs(p);
    }
    return 0.0;
  }

  void validate() const {
    if (!(rho > 0.0)) throw std::invalid_argument("SizeParams: rho must be positive");
    if (!(alpha_s0 > 0.0)) throw std::invalid_argument("SizeParams: alpha_s0 must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("SizeParams: tau must be positive");
    if (shaping == ShapingFunction::Custom && !custom_fs)
      throw std::invalid_argument("SizeParams: custom shaping function missing");
  }
};

/// Constants behind the size-control convergence theorem. C is the headline
/// worst-case value used for the tau bound; C_exact = 2 beta Gamma uses the
/// exact chord ratios gamma_m and drives the discrete recursion.
struct SizeConstants {
  double beta = 0.0;
  VecX gammas;            // gamma_m = sin(m pi / n) / sin(pi / n), gamma_1 = 1
  double Gamma = 0.0;     // exact: sum k_m gamma_m
  double Gamma_worst = 0.0;
  double C = 0.0;         // headline worst case, 2 * Gamma_worst
  double C_exact = 0.0;   // 2 * beta * Gamma
  double T = 0.0;         // sandwich constant for sin(alpha_s0 fs(p))
};

/// Per-edge normalized distance errors p_i = 1 - ||x_{i+1} - x_i|| / rho and
/// their mean p_bar.
std::pair<VecX, double> inter_robot_errors(const VecX& x, double rho);

/// Symmetric cyclic control with every rotation angle set to
/// m pi / n + alpha_s0 fs(p_bar_delayed); base angles must be m pi / n.
VecX size_cyclic_control(const VecX& x, const CyclicParams& cyclic, const SizeParams& size,
                         double p_bar_delayed);

SizeConstants size_constants(int n, const VecX& gains, double alpha_s0, const SizeParams& size);

/// Time-lag admissibility bound min{1/C, 1/(8 C T)}.
double tau_bound(const SizeConstants& c);

struct Theorem5Report {
  double grid_infimum = 0.0;  // inf over the alpha_s interval of the eigenvalue minimum
  double tau = 0.0;
  double tau_limit = 0.0;
  SizeConstants constants;
  bool eig_ok = false;
  bool tau_ok = false;
  bool certified = false;
  std::vector<std::string> warnings;
};

/// Certification for size control: eigenvalue infimum over the perturbed
/// angle interval (201-point uniform grid) and the tau bound.
Theorem5Report theorem5_certify(const CyclicParams& cyclic, const SizeParams& size,
                                int grid_points = 201);

/// Geometric-center control: the same additive term for every robot.
struct CenterParams {
  Vec3 target = Vec3::Zero();
  double gain = 0.0;
  double tau = 0.1;

  void validate() const {
    if (!(gain > 0.0)) throw std::invalid_argument("CenterParams: gain must be positive");
  }
};

VecX center_control(int n, const CenterParams& c, const Vec3& center_delayed);

inline Vec3 geometric_center(const VecX& x) {
  const int n = int(x.size() / 3);
  Vec3 c = Vec3::Zero();
  for (int i = 0; i < n; ++i) c += x.segment<3>(3 * i);
  return c / double(n);
}

enum class CollisionVariant { HardRpf, LosGated, TanhSoft };

struct CollisionParams {
  double r1 = 0.0;  // robot bounding radius
  double r2 = 0.0;  // detection radius
  CollisionVariant variant = CollisionVariant::HardRpf;
  double k_coll = 0.0;  // tanh variant gain
  double rho = 0.0;     // tanh variant reference distance

  void validate() const {
    if (!(0.0 < r1 && r1 < r2))
      throw std::invalid_argument("CollisionParams: need 0 < r1 < r2");
  }
};

/// Repulsive potential, defined on (r1, r2] and zero beyond r2; blows up as
/// d -> r1 from above. Throws std::domain_error at or below r1.
double rpf_value(double d, const CollisionParams& cp);

/// Normalized force magnitude f_c(d) = (d - r2)^2 / (d (d - r1)^2) on
/// (r1, r2], zero beyond r2; satisfies dV/dd = -d * f_c(d).
double rpf_force(double d, const CollisionParams& cp);

struct CollisionControl {
  VecX u;
  bool collided = false;          // some pair at or below r1
  double min_distance = 0.0;
  std::pair<int, int> closest{-1, -1};
};

/// Pairwise escape-velocity controller. velocities are required by the
/// line-of-sight gated variant and ignored otherwise.
CollisionControl collision_control(const VecX& x, const std::optional<VecX>& velocities,
                                   const CollisionParams& cp);

/// Disturbance model for the robustness bound. lambda carries the paper's
/// sign convention (negative for a contracting system); bounds use |lambda|.
struct RobustnessModel {
  double lambda = 0.0;
  double d_bar = 0.0;
};

/// Closed-form deviation bound (d_bar / |lambda|) (1 - e^{-|lambda| t}).
double robustness_bound(const RobustnessModel& rm, double t);

/// Tighter bound from integrating Rdot = -|lambda| R + ||d(t)|| with the
/// sampled disturbance norms held constant over each step of width dt.
/// Never exceeds the closed-form bound once d_bar >= max ||d||.
VecX robustness_ode_bound(const RobustnessModel& rm, const VecX& disturbance_norms, double dt);

/// One-sided rotational controller aligning face Q1 with its neighbor Q2.
struct SharedEdgeInfo {
  int edge_tail = -1;   // robot j: the shared edge runs j -> j+1 in face-1 order
  int edge_head = -1;   // robot j+1
  Mat3 q2_normal_rotation = Mat3::Identity();
};

/// Alignment scalar k_r = (x_{j+1} - x_j) . (R_eta2^T e_z); zero when the
/// shared edge lies in face 2's plane.
double rotational_alignment(const VecX& x, const SharedEdgeInfo& edge);

/// Control contribution for every robot of face 1 (returned stacked over the
/// face-1 robots in face order): |k_r| gates a forward or rear one-sided
/// cyclic term with rotation angle pi / |V_1|, flow-invariant on the face-1
/// polygon subspace.
VecX rotational_q1_control(const VecX& x, const std::vector<int>& face1_ids,
                           const Mat3& face1_rotation, const SharedEdgeInfo& edge);

}  // namespace pursuit
