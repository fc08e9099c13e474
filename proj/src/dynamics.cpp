#include "teleop/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Cholesky>

#include "teleop/spd.hpp"

namespace teleop {

namespace {

double min_jerk(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double window(const SineComponent& c, double t) {
  if (t < c.start_s || t > c.end_s) return 0.0;
  if (c.ramp_s <= 0.0) return 1.0;
  const double edge = std::min(t - c.start_s, c.end_s - t);
  if (edge >= c.ramp_s) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * edge / c.ramp_s);
}

}  // namespace

Vec6 dof_mask(DofSet dofs) {
  Vec6 m = Vec6::Ones();
  if (dofs == DofSet::Translational) m.head<3>().setZero();
  return m;
}

Mat6 InertiaSchedule::at(double t) const {
  if (amplitude == 0.0) return base;
  return base * (1.0 + amplitude * std::sin(2.0 * std::numbers::pi * t / period_s));
}

CartesianModel::CartesianModel(const InertiaSchedule& lambda, const Mat6& mu, DofSet dofs, const Pose& initial)
    : lambda_(lambda), mu_(mu), dofs_(dofs), mask_(dof_mask(dofs)), pose_(initial) {
  require_spd(lambda.base, "Cartesian inertia");
  if (!(std::abs(lambda.amplitude) < 1.0)) throw OutOfDomain("inertia modulation amplitude must be below 1");
  if (lambda.amplitude != 0.0 && !(lambda.period_s > 0.0)) {
    throw OutOfDomain("inertia modulation period must be positive");
  }
  if (!mu.allFinite()) throw OutOfDomain("damping matrix has non-finite entries");
}

Twist CartesianModel::step(const Vec6& f, double dt) {
  if (!(dt > 0.0)) throw OutOfDomain("step_cartesian: dt must be positive");
  const Mat6 lam = lambda_.at(t_);
  require_spd(lam, "Cartesian inertia");
  const Vec6 v = twist_.vector();
  const Vec6 rhs = mask_.cwiseProduct(f) - mu_ * v;
  const Vec6 v_next = mask_.cwiseProduct(v + dt * lam.llt().solve(rhs));
  twist_ = Twist::from_vector(v_next, Frame::Body);
  pose_ = integrate_body(pose_, twist_, dt);
  t_ += dt;
  return twist_;
}

double CartesianModel::kinetic_energy() const {
  const Vec6 v = twist_.vector();
  return 0.5 * v.dot(lambda_.at(t_) * v);
}

void CartesianModel::set_state(const Pose& pose, const Twist& twist) {
  pose_ = pose;
  twist_ = Twist::from_vector(mask_.cwiseProduct(twist.vector()), Frame::Body);
}

Vec6 pose_error(const Pose& from, const Pose& to) {
  const Pose rel = from.inverse() * to;
  Vec6 e;
  e << log_so3(rel.r), rel.p;
  return e;
}

Pose TrajectorySpec::at(double t) const {
  Vec3 p = Vec3::Zero();
  Vec3 rv = Vec3::Zero();
  if (!waypoints.empty()) {
    if (t <= waypoints.front().t) {
      p = waypoints.front().position;
      rv = waypoints.front().rotation;
    } else if (t >= waypoints.back().t) {
      p = waypoints.back().position;
      rv = waypoints.back().rotation;
    } else {
      auto next = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                                   [](double tt, const Waypoint& w) { return tt < w.t; });
      const Waypoint& b = *next;
      const Waypoint& a = *(next - 1);
      const double s = min_jerk((t - a.t) / (b.t - a.t));
      p = a.position + s * (b.position - a.position);
      rv = a.rotation + s * (b.rotation - a.rotation);
    }
  }
  for (const SineComponent& c : sines) {
    const double x = c.amplitude * window(c, t) * std::sin(2.0 * std::numbers::pi * c.frequency_hz * t + c.phase_rad);
    if (c.axis < 3) {
      rv[c.axis] += x;
    } else {
      p[c.axis - 3] += x;
    }
  }
  return Pose{exp_so3(rv), p};
}

Vec6 operator_force(const CartesianModel& m, const OperatorScript& script) {
  const Pose target = script.trajectory(m.time());
  return script.k_h * pose_error(m.pose(), target) - script.d_h * m.twist().vector();
}

Twist step_master(CartesianModel& m, const OperatorScript& script, const Vec6& f_feedback, double dt) {
  return m.step(operator_force(m, script) + f_feedback, dt);
}

void SlaveControllerGains::validate(DofSet dofs) const {
  if (dofs == DofSet::Translational) {
    require_spd(k_p.bottomRightCorner<3, 3>(), "slave stiffness K_p");
    require_spd(k_d.bottomRightCorner<3, 3>(), "slave damping K_d");
    return;
  }
  require_spd(k_p, "slave stiffness K_p");
  require_spd(k_d, "slave damping K_d");
}

Vec6 slave_force(const SlaveControllerGains& gains, const Pose& g_ref, const Twist& v_ref, const Pose& g_s,
                 const Twist& v_s) {
  return gains.k_p * pose_error(g_s, g_ref) + gains.k_d * (v_ref.vector() - v_s.vector());
}

}  // namespace teleop
