#include "teleop/liegroup.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace teleop {

namespace {

constexpr double kOrthoReproject = 1e-12;
constexpr double kSkewTolerance = 1e-9;

// sin(t)/t and (1 - cos t)/t^2
void rodrigues_coefficients(double t, double& a, double& b) {
  if (t < kSmallAngle) {
    const double t2 = t * t;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
    return;
  }
  const double s = std::sin(0.5 * t);
  a = std::sin(t) / t;
  b = 2.0 * s * s / (t * t);
}

// (1 - alpha(t)) / t^2
double inv_coefficient(double t) {
  if (t < kSmallAngle) return 1.0 / 12.0 + t * t / 720.0;
  return (1.0 - cot_alpha(t)) / (t * t);
}

void check_a_inv_domain(double t) {
  if (t >= 2.0 * std::numbers::pi - kCotMargin) {
    throw OutOfDomain("A(phi)^-1 is undefined for |phi| >= 2*pi (|phi| = " + std::to_string(t) + ")");
  }
}

}  // namespace

Rotation::Rotation(const Mat3& m) : m_(m) {
  if (!m.allFinite()) throw OutOfDomain("rotation matrix has non-finite entries");
  if (m.determinant() <= 0.0) throw OutOfDomain("rotation matrix must have positive determinant");
  if (orthonormality_error() > kOrthoReproject) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    m_ = svd.matrixU() * svd.matrixV().transpose();
  }
}

double Rotation::orthonormality_error() const {
  return (m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
  h.topLeftCorner<3, 3>() = r.matrix();
  h.topRightCorner<3, 1>() = p;
  return h;
}

AdjointMatrix::AdjointMatrix(const Pose& g) {
  const Mat3& r = g.r.matrix();
  m_.setZero();
  m_.topLeftCorner<3, 3>() = r;
  m_.bottomRightCorner<3, 3>() = r;
  m_.bottomLeftCorner<3, 3>() = hat(g.p) * r;
}

Mat6 AdjointMatrix::inverse() const {
  const Mat3 rt = m_.topLeftCorner<3, 3>().transpose();
  Mat6 inv = Mat6::Zero();
  inv.topLeftCorner<3, 3>() = rt;
  inv.bottomRightCorner<3, 3>() = rt;
  // lower-left of Ad is p^ R, so -R^T p^ R R^T = -R^T (p^ R) R^T
  inv.bottomLeftCorner<3, 3>() = -rt * m_.bottomLeftCorner<3, 3>() * rt;
  return inv;
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) {
  const double sym = (m + m.transpose()).cwiseAbs().maxCoeff() * 0.5;
  if (sym > kSkewTolerance) {
    throw NotSkewSymmetric("vee: matrix is not skew-symmetric (symmetric part " + std::to_string(sym) + ")");
  }
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Rotation exp_so3(const Vec3& phi) {
  const double t = phi.norm();
  double a = 0.0;
  double b = 0.0;
  rodrigues_coefficients(t, a, b);
  const Mat3 k = hat(phi);
  return Rotation(Mat3::Identity() + a * k + b * k * k, Rotation::Unchecked{});
}

Vec3 log_so3(const Rotation& r) {
  const Mat3& m = r.matrix();
  const Vec3 axis2(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));  // 2 sin(g) u
  const double gamma = std::atan2(0.5 * axis2.norm(), 0.5 * (m.trace() - 1.0));
  if (gamma >= std::numbers::pi - kPiMargin) {
    throw NearPiRotation("log_so3: rotation angle " + std::to_string(gamma) + " too close to pi");
  }
  double factor = 0.0;
  if (gamma < kSmallAngle) {
    factor = 0.5 + gamma * gamma / 12.0;
  } else {
    factor = gamma / (2.0 * std::sin(gamma));
  }
  return factor * axis2;
}

double cot_alpha(double theta) {
  if (theta < kSmallAngle) return 1.0 - theta * theta / 12.0;
  const double h = 0.5 * theta;
  return h * std::cos(h) / std::sin(h);
}

Mat3 a_matrix(const Vec3& phi) {
  const double t = phi.norm();
  double b = 0.0;  // (1 - cos t)/t^2
  double c = 0.0;  // (t - sin t)/t^3
  if (t < kSmallAngle) {
    b = 0.5 - t * t / 24.0;
    c = 1.0 / 6.0 - t * t / 120.0;
  } else {
    const double s = std::sin(0.5 * t);
    b = 2.0 * s * s / (t * t);
    c = (t - std::sin(t)) / (t * t * t);
  }
  const Mat3 k = hat(phi);
  return Mat3::Identity() + b * k + c * k * k;
}

Mat3 a_inv(const Vec3& phi) {
  const double t = phi.norm();
  check_a_inv_domain(t);
  const Mat3 k = hat(phi);
  return Mat3::Identity() - 0.5 * k + inv_coefficient(t) * k * k;
}

Mat3 a_inv_transpose(const Vec3& phi) {
  const double t = phi.norm();
  check_a_inv_domain(t);
  const Mat3 k = hat(phi);
  return Mat3::Identity() + 0.5 * k + inv_coefficient(t) * k * k;
}

Pose exp_se3(const Vec3& phi, const Vec3& q) {
  return Pose{exp_so3(phi), a_matrix(phi) * q};
}

AdjointMatrix adjoint(const Pose& g) { return AdjointMatrix(g); }

Pose integrate_body(const Pose& g_prev, const Twist& v, double dt) {
  if (v.frame != Frame::Body) throw FrameMismatch("integrate_body expects a body twist");
  if (!(dt > 0.0)) throw OutOfDomain("integrate_body: dt must be positive");
  return g_prev * exp_se3(v, dt);
}

Pose integrate_spatial(const Pose& g_prev, const Twist& v, double dt) {
  if (v.frame != Frame::Spatial) throw FrameMismatch("integrate_spatial expects a spatial twist");
  if (!(dt > 0.0)) throw OutOfDomain("integrate_spatial: dt must be positive");
  return exp_se3(v, dt) * g_prev;
}

Vec3 rpy(const Rotation& r) {
  const Mat3& m = r.matrix();
  const double pitch = std::asin(std::clamp(-m(2, 0), -1.0, 1.0));
  return Vec3(std::atan2(m(2, 1), m(2, 2)), pitch, std::atan2(m(1, 0), m(0, 0)));
}

}  // namespace teleop
