#pragma once

// SO(3)/SE(3) kernel used by the drift compensator and the device models.
//
// Twists are ordered angular-first, V = [w; v]. Adjoints use the matching
// block layout [R 0; p^R R]. Rotations are stored as 3x3 matrices.

#include <Eigen/Core>

#include "teleop/errors.hpp"

namespace teleop {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Below this angle the closed forms are replaced by their Taylor series.
inline constexpr double kSmallAngle = 1e-6;
// log_so3 refuses rotations with angle >= pi - kPiMargin.
inline constexpr double kPiMargin = 1e-6;
// a_inv / a_inv_transpose refuse |phi| >= 2*pi - kCotMargin.
inline constexpr double kCotMargin = 1e-6;

class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  // Projects m onto SO(3) when ||m^T m - I||_inf exceeds 1e-12.
  // Throws OutOfDomain if det(m) <= 0.
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }

  const Mat3& matrix() const { return m_; }
  double trace() const { return m_.trace(); }

  Rotation inverse() const { return Rotation(m_.transpose(), Unchecked{}); }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
  Vec3 operator*(const Vec3& x) const { return m_ * x; }

  // ||R^T R - I||_inf
  double orthonormality_error() const;

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}

  friend Rotation exp_so3(const Vec3& phi);

  Mat3 m_;
};

struct Pose {
  Rotation r;
  Vec3 p = Vec3::Zero();

  static Pose identity() { return Pose{}; }
  static Pose translation(const Vec3& p) { return Pose{Rotation(), p}; }

  Pose operator*(const Pose& o) const { return Pose{r * o.r, r * o.p + p}; }
  Vec3 operator*(const Vec3& x) const { return r * x + p; }
  Pose inverse() const {
    Rotation rt = r.inverse();
    return Pose{rt, -(rt * p)};
  }

  // 4x4 homogeneous matrix, mostly for tests.
  Eigen::Matrix4d matrix() const;
};

enum class Frame { Body, Spatial };

struct Twist {
  Vec3 w = Vec3::Zero();  // rad/s
  Vec3 v = Vec3::Zero();  // m/s
  Frame frame = Frame::Body;

  static Twist zero(Frame f = Frame::Body) { return Twist{Vec3::Zero(), Vec3::Zero(), f}; }
  static Twist from_vector(const Vec6& x, Frame f = Frame::Body) {
    return Twist{x.head<3>(), x.tail<3>(), f};
  }

  Vec6 vector() const {
    Vec6 x;
    x << w, v;
    return x;
  }
};

class AdjointMatrix {
 public:
  explicit AdjointMatrix(const Pose& g);

  const Mat6& matrix() const { return m_; }
  Vec6 operator*(const Vec6& x) const { return m_ * x; }

  // Exact inverse from the block structure: [R^T 0; -R^T p^ R^T].
  Mat6 inverse() const;
  // Inverse transpose, maps a wrench expressed in the source frame of the
  // adjoint to the target frame while preserving twist-wrench power.
  Mat6 inverse_transpose() const { return inverse().transpose(); }

 private:
  Mat6 m_;
};

Mat3 hat(const Vec3& v);
// Throws NotSkewSymmetric if the symmetric part of m exceeds 1e-9.
Vec3 vee(const Mat3& m);

Rotation exp_so3(const Vec3& phi);
// Throws NearPiRotation for rotation angles >= pi - kPiMargin.
Vec3 log_so3(const Rotation& r);

// A(phi), the matrix mapping the translational generator to the position
// block of exp_se3.
Mat3 a_matrix(const Vec3& phi);
// Both throw OutOfDomain for |phi| >= 2*pi - kCotMargin.
Mat3 a_inv(const Vec3& phi);
Mat3 a_inv_transpose(const Vec3& phi);

// alpha(t) = (t/2) cot(t/2), alpha(0) = 1.
double cot_alpha(double theta);

Pose exp_se3(const Vec3& phi, const Vec3& q);
inline Pose exp_se3(const Twist& x, double dt) { return exp_se3(x.w * dt, x.v * dt); }

AdjointMatrix adjoint(const Pose& g);

// g(k) = g(k-1) * exp(V dt). Throws FrameMismatch unless v is a body twist,
// OutOfDomain unless dt > 0.
Pose integrate_body(const Pose& g_prev, const Twist& v, double dt);
// g(k) = exp(V dt) * g(k-1) for a spatial twist.
Pose integrate_spatial(const Pose& g_prev, const Twist& v, double dt);

// Roll-pitch-yaw (ZYX convention), output logging only.
Vec3 rpy(const Rotation& r);

}  // namespace teleop
