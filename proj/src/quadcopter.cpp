#include "pursuit/quadcopter.hpp"

namespace pursuit {

VecX QuadState::pack() const {
  VecX raw(kDim);
  raw.segment<3>(0) = position;
  raw.segment<3>(3) = velocity;
  raw[6] = attitude.w();
  raw[7] = attitude.x();
  raw[8] = attitude.y();
  raw[9] = attitude.z();
  raw.segment<3>(10) = body_rates;
  return raw;
}

QuadState QuadState::unpack(const Eigen::Ref<const VecX>& raw) {
  QuadState s;
  s.position = raw.segment<3>(0);
  s.velocity = raw.segment<3>(3);
  s.attitude = Eigen::Quaterniond(raw[6], raw[7], raw[8], raw[9]);
  s.body_rates = raw.segment<3>(10);
  return s;
}

void QuadParams::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("QuadParams: mass must be positive");
  if ((inertia - inertia.transpose()).norm() > 1e-12)
    throw std::invalid_argument("QuadParams: inertia must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("QuadParams: inertia must be positive definite");
}

void TrackerGains::validate() const {
  if (kp_v.minCoeff() < 0.0 || ki_v.minCoeff() < 0.0 || kd_v.minCoeff() < 0.0)
    throw std::invalid_argument("TrackerGains: velocity gains must be nonnegative");
  if (!(v_max > 0.0)) throw std::invalid_argument("TrackerGains: v_max must be positive");
}

VecX quad_derivative(const QuadState& s, const ThrustMoment& tm, const QuadParams& p) {
  const Mat3 r_bi = s.attitude.toRotationMatrix();  // body -> inertial
  VecX dot(QuadState::kDim);
  dot.segment<3>(0) = s.velocity;
  dot.segment<3>(3) = r_bi * Vec3(0.0, 0.0, -tm.thrust / p.mass) + Vec3(0.0, 0.0, p.gravity);
  const Eigen::Quaterniond omega_q(0.0, s.body_rates.x(), s.body_rates.y(), s.body_rates.z());
  const Eigen::Quaterniond qdot = s.attitude * omega_q;
  dot[6] = 0.5 * qdot.w();
  dot[7] = 0.5 * qdot.x();
  dot[8] = 0.5 * qdot.y();
  dot[9] = 0.5 * qdot.z();
  dot.segment<3>(10) =
      p.inertia.inverse() * (tm.moment - s.body_rates.cross(p.inertia * s.body_rates));
  return dot;
}

Vec3 saturate_velocity(const Vec3& v, double v_max) {
  if (!(v_max > 0.0)) throw std::invalid_argument("saturate_velocity: v_max must be positive");
  const double speed = v.norm();
  return speed <= v_max ? v : Vec3(v * (v_max / speed));
}

Eigen::Quaterniond quaternion_from_euler_zyx(double yaw, double pitch, double roll) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                            Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                            Eigen::AngleAxisd(roll, Vec3::UnitX()));
}

TrackerCommand tracker_command(const QuadState& s, const Vec3& v_desired,
                               const TrackerGains& gains, const QuadParams& p,
                               const Vec3& integral, const Vec3& error_derivative) {
  TrackerCommand out;
  out.velocity_error = v_desired - s.velocity;
  const Vec3 a_d = gains.kp_v.cwiseProduct(out.velocity_error) +
                   gains.ki_v.cwiseProduct(integral) +
                   gains.kd_v.cwiseProduct(error_derivative);

  // Vertical channel decouples: -T + m g = m a_dz.
  double thrust = p.mass * (p.gravity - a_d.z());
  const double floor = 0.05 * p.mass * p.gravity;
  out.thrust_floor_hit = thrust < floor;
  if (out.thrust_floor_hit) thrust = floor;

  // Small-angle solve of [-T sin(psi), -T cos(psi); T cos(psi), -T sin(psi)]
  // [phi; theta] = m [a_dx; a_dy] for the lateral channels.
  const double psi = gains.yaw_desired;
  const double c = std::cos(psi), sn = std::sin(psi);
  double roll = p.mass / thrust * (-sn * a_d.x() + c * a_d.y());
  double pitch = p.mass / thrust * (-c * a_d.x() - sn * a_d.y());
  const double tilt_cap = kPi / 4.0;
  roll = std::clamp(roll, -tilt_cap, tilt_cap);
  pitch = std::clamp(pitch, -tilt_cap, tilt_cap);

  const Eigen::Quaterniond q_d = quaternion_from_euler_zyx(psi, pitch, roll);
  Eigen::Quaterniond dq = q_d * s.attitude.conjugate();
  if (dq.w() < 0.0) dq.coeffs() *= -1.0;  // shortest correction
  const Vec3 axis_part(dq.x(), dq.y(), dq.z());
  const double half_angle = std::atan2(axis_part.norm(), dq.w());
  Vec3 axis = Vec3::Zero();
  if (axis_part.norm() > 1e-12) axis = axis_part.normalized();

  out.tm.thrust = thrust;
  out.tm.moment = gains.kp_att * (2.0 * half_angle) * axis - gains.kd_att * s.body_rates;
  return out;
}

ThrustMoment velocity_tracker(const QuadState& s, const Vec3& v_desired,
                              const TrackerGains& gains, const QuadParams& p,
                              TrackerState& memory, double dt) {
  gains.validate();
  Vec3 derivative = Vec3::Zero();
  const Vec3 error = v_desired - s.velocity;
  if (memory.has_prev && dt > 0.0) derivative = (error - memory.prev_error) / dt;
  const TrackerCommand cmd = tracker_command(s, v_desired, gains, p, memory.integral, derivative);
  memory.thrust_floor_hit = cmd.thrust_floor_hit;
  if (!cmd.thrust_floor_hit && dt > 0.0) memory.integral += error * dt;
  memory.prev_error = error;
  memory.has_prev = true;
  return cmd.tm;
}

}  // namespace pursuit
