#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

namespace wbt {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

// exp: rotation vector -> unit quaternion.
inline Quat quat_exp(const Vec3& w) {
  const double angle = w.norm();
  if (angle < 1e-12) {
    Quat q(1.0, 0.5 * w.x(), 0.5 * w.y(), 0.5 * w.z());
    q.normalize();
    return q;
  }
  const double half = 0.5 * angle;
  const double s = std::sin(half) / angle;
  return Quat(std::cos(half), s * w.x(), s * w.y(), s * w.z());
}

// log: unit quaternion -> rotation vector with |theta| <= pi.
inline Vec3 quat_log(const Quat& q_in) {
  Quat q = q_in;
  if (q.w() < 0) q.coeffs() *= -1.0;
  const Vec3 v(q.x(), q.y(), q.z());
  const double vn = v.norm();
  if (vn < 1e-12) return 2.0 * v;
  const double angle = 2.0 * std::atan2(vn, q.w());
  return v * (angle / vn);
}

inline double geodesic_angle(const Quat& a, const Quat& b) {
  return quat_log(a.conjugate() * b).norm();
}

inline double geodesic_angle(const Mat3& a, const Mat3& b) {
  return quat_log(Quat(a).conjugate() * Quat(b)).norm();
}

// Integrate a world-frame angular velocity over dt.
inline Quat quat_integrate(const Quat& q, const Vec3& omega_world, double dt) {
  Quat out = quat_exp(omega_world * dt) * q;
  out.normalize();
  return out;
}

// Canonical axis-angle: |angle| <= pi.
inline Vec3 canonical_axis_angle(const Vec3& aa) { return quat_log(quat_exp(aa)); }

inline double yaw_of(const Quat& q) {
  // Heading of the body x axis projected on the ground plane.
  const Vec3 fwd = q * Vec3::UnitX();
  return std::atan2(fwd.y(), fwd.x());
}

inline Quat heading_quat(const Quat& q) {
  return Quat(Eigen::AngleAxisd(yaw_of(q), Vec3::UnitZ()));
}

// First two columns of the rotation matrix; a continuous 6-D encoding.
inline Eigen::Matrix<double, 6, 1> rot_to_6d(const Mat3& r) {
  Eigen::Matrix<double, 6, 1> out;
  out << r(0, 0), r(1, 0), r(2, 0), r(0, 1), r(1, 1), r(2, 1);
  return out;
}

inline Quat slerp(const Quat& a, const Quat& b, double t) { return a.slerp(t, b); }

inline double wrap_pi(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0) a += two_pi;
  return a - std::numbers::pi;
}

}  // namespace wbt
