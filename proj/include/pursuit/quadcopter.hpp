#pragma once

#include <Eigen/Geometry>

#include "pursuit/linalg.hpp"

namespace pursuit {

/// Rigid-body quadcopter state in a Z-down inertial frame. The attitude
/// quaternion maps body vectors to inertial vectors (Hamilton, scalar first),
/// so R_ib = attitude.toRotationMatrix().transpose().
struct QuadState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Eigen::Quaterniond attitude = Eigen::Quaterniond::Identity();
  Vec3 body_rates = Vec3::Zero();  // rad/s, body frame

  static constexpr int kDim = 13;

  VecX pack() const;
  static QuadState unpack(const Eigen::Ref<const VecX>& raw);
};

struct QuadParams {
  double mass = 1.0;                         // kg
  Mat3 inertia = 0.01 * Mat3::Identity();    // kg m^2
  double gravity = 9.81;                     // m/s^2

  void validate() const;
};

/// Net thrust (along -body z) and body torque commanded instantaneously.
struct ThrustMoment {
  double thrust = 0.0;  // N, >= 0
  Vec3 moment = Vec3::Zero();
};

/// Velocity-tracking gains: PID on inertial velocity, PD on attitude.
struct TrackerGains {
  Vec3 kp_v = Vec3::Constant(4.0);
  Vec3 ki_v = Vec3::Constant(0.4);
  Vec3 kd_v = Vec3::Zero();
  Mat3 kp_att = 8.0 * Mat3::Identity();
  Mat3 kd_att = 0.8 * Mat3::Identity();
  double yaw_desired = 0.0;
  double v_max = 3.0;  // m/s speed cap on commanded velocity

  void validate() const;
};

/// Mutable tracker memory (integral and derivative states), one per quad.
struct TrackerState {
  Vec3 integral = Vec3::Zero();
  Vec3 prev_error = Vec3::Zero();
  bool has_prev = false;
  bool thrust_floor_hit = false;
};

/// Rigid-body derivative: vdot = R_ib^T (0,0,-T/m) + (0,0,g),
/// qdot = 1/2 q (x) (0, omega), omegadot = I^-1 (M - omega x I omega).
VecX quad_derivative(const QuadState& s, const ThrustMoment& tm, const QuadParams& p);

/// Pure tracker evaluation against an explicit integral/derivative estimate;
/// velocity_tracker and the simulation engine both delegate here.
struct TrackerCommand {
  ThrustMoment tm;
  Vec3 velocity_error = Vec3::Zero();
  bool thrust_floor_hit = false;
};

TrackerCommand tracker_command(const QuadState& s, const Vec3& v_desired,
                               const TrackerGains& gains, const QuadParams& p,
                               const Vec3& integral, const Vec3& error_derivative);

/// Speed cap preserving direction.
Vec3 saturate_velocity(const Vec3& v, double v_max);

/// Two-stage velocity tracker: PID gives a desired acceleration, the
/// small-angle solve yields thrust plus roll/pitch, and a quaternion-error PD
/// law produces the moment. dt advances the integral state.
ThrustMoment velocity_tracker(const QuadState& s, const Vec3& v_desired,
                              const TrackerGains& gains, const QuadParams& p,
                              TrackerState& memory, double dt);

/// ZYX Euler angles (yaw, pitch, roll) to a body-to-inertial quaternion.
Eigen::Quaterniond quaternion_from_euler_zyx(double yaw, double pitch, double roll);

}  // namespace pursuit
