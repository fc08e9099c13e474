#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "teleop/dynamics.hpp"
#include "teleop/selfcheck.hpp"

using namespace teleop;

namespace {

constexpr double kDt = 0.001;

InertiaSchedule constant_inertia(const Mat6& m) { return InertiaSchedule{m, 0.0, 1.0}; }

Mat6 random_spd(std::mt19937_64& gen) {
  Mat6 a;
  for (int c = 0; c < 6; ++c) a.col(c) << random_vector(gen, 1.0), random_vector(gen, 1.0);
  return a * a.transpose() + Mat6::Identity();
}

}  // namespace

TEST(CartesianModel, RestsWithoutForce) {
  CartesianModel m(constant_inertia(Mat6::Identity()), Mat6::Identity(), DofSet::Full, Pose::identity());
  for (int k = 0; k < 100; ++k) m.step(Vec6::Zero(), kDt);
  EXPECT_EQ(m.twist().vector(), Vec6::Zero());
  EXPECT_EQ(m.pose().matrix(), Eigen::Matrix4d::Identity());
  EXPECT_NEAR(m.time(), 0.1, 1e-12);
}

TEST(CartesianModel, UnitMassConstantForce) {
  CartesianModel m(constant_inertia(Mat6::Identity()), Mat6::Zero(), DofSet::Full, Pose::identity());
  const Vec6 f = Vec6::Unit(5);
  for (int k = 1; k <= 1000; ++k) {
    const Twist v = step_cartesian(m, f, kDt);
    ASSERT_NEAR(v.v.z(), k * kDt, 1e-12);
  }
}

TEST(CartesianModel, EnergyAuditAgainstTrapezoidalWork) {
  std::mt19937_64 gen(1);
  const Mat6 lam = random_spd(gen);
  CartesianModel m(constant_inertia(lam), Mat6::Zero(), DofSet::Full, Pose::identity());
  std::normal_distribution<double> n(0.0, 1.0);
  double work = 0.0;
  const double ke0 = m.kinetic_energy();
  for (int k = 0; k < 10000; ++k) {
    Vec6 f;
    for (int i = 0; i < 6; ++i) f[i] = n(gen);
    const Vec6 v0 = m.twist().vector();
    const Vec6 v1 = m.step(f, kDt).vector();
    work += 0.5 * kDt * f.dot(v0 + v1);
  }
  EXPECT_NEAR(m.kinetic_energy() - ke0, work, 1e-6);
}

TEST(CartesianModel, RejectsInvalidInertia) {
  Mat6 bad = Mat6::Identity();
  bad(4, 4) = 0.0;
  EXPECT_THROW(CartesianModel(constant_inertia(bad), Mat6::Zero(), DofSet::Full, Pose::identity()), NotSPD);
  EXPECT_THROW(CartesianModel(InertiaSchedule{Mat6::Identity(), 1.0, 1.0}, Mat6::Zero(), DofSet::Full,
                              Pose::identity()),
               OutOfDomain);
  CartesianModel m(constant_inertia(Mat6::Identity()), Mat6::Zero(), DofSet::Full, Pose::identity());
  EXPECT_THROW(m.step(Vec6::Zero(), 0.0), OutOfDomain);
}

TEST(CartesianModel, TimeVaryingInertiaSampledPerTick) {
  const InertiaSchedule s{2.0 * Mat6::Identity(), 0.5, 2.0};
  EXPECT_NEAR(s.at(0.5)(0, 0), 3.0, 1e-12);
  EXPECT_NEAR(s.at(1.5)(0, 0), 1.0, 1e-12);
  CartesianModel m(s, Mat6::Zero(), DofSet::Full, Pose::identity());
  m.step(Vec6::Unit(3), kDt);
  EXPECT_NEAR(m.twist().v.x(), kDt / 2.0, 1e-15);
}

TEST(CartesianModel, TranslationalMaskFreezesRotation) {
  CartesianModel m(constant_inertia(Mat6::Identity()), Mat6::Zero(), DofSet::Translational, Pose::identity());
  for (int k = 0; k < 100; ++k) m.step(Vec6::Ones(), kDt);
  EXPECT_EQ(m.twist().w, Vec3::Zero());
  EXPECT_EQ(m.pose().r.matrix(), Mat3::Identity());
  EXPECT_GT(m.twist().v.x(), 0.0);
}

TEST(CartesianModel, FirstOrderTimeStepConvergence) {
  auto final_pose = [](double dt) {
    CartesianModel m(constant_inertia(Mat6::Identity()), 0.5 * Mat6::Identity(), DofSet::Full, Pose::identity());
    const int n = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k < n; ++k) {
      const double t = k * dt;
      Vec6 f;
      f << 0.3 * std::sin(t), 0.1, -0.2 * std::cos(2 * t), std::cos(t), 0.5, -std::sin(3 * t);
      m.step(f, dt);
    }
    return m.pose().matrix();
  };
  const auto a = final_pose(1e-2), b = final_pose(5e-3), c = final_pose(2.5e-3);
  const double e1 = (a - b).cwiseAbs().maxCoeff();
  const double e2 = (b - c).cwiseAbs().maxCoeff();
  EXPECT_NEAR(e1 / e2, 2.0, 0.2);
}

TEST(SlaveForce, ZeroAtReference) {
  SlaveControllerGains g{100.0 * Mat6::Identity(), 10.0 * Mat6::Identity()};
  const Pose p{exp_so3(Vec3(0.1, 0.2, 0.3)), Vec3(1, 2, 3)};
  const Twist v{Vec3(0.1, 0, 0), Vec3(0, 1, 0), Frame::Body};
  EXPECT_LE(slave_force(g, p, v, p, v).norm(), 1e-12);
}

TEST(SlaveForce, PositionOffset) {
  SlaveControllerGains g{100.0 * Mat6::Identity(), Mat6::Identity()};
  const Vec6 f = slave_force(g, Pose::translation(Vec3(0.01, 0, 0)), Twist::zero(), Pose::identity(), Twist::zero());
  EXPECT_NEAR(f[3], 1.0, 1e-12);
  EXPECT_EQ(f.head<3>(), Vec3::Zero());
}

TEST(SlaveForce, LipschitzInReference) {
  std::mt19937_64 gen(2);
  SlaveControllerGains g{50.0 * Mat6::Identity(), 5.0 * Mat6::Identity()};
  const Pose gs{exp_so3(Vec3(0.2, -0.1, 0.3)), Vec3(0.1, 0.2, 0.3)};
  const Twist vs{Vec3(0.1, 0.2, 0.0), Vec3(0.3, 0.0, -0.1), Frame::Body};
  for (int i = 0; i < 200; ++i) {
    const Pose r1{exp_so3(random_rotation_vector(gen, 1.0)), random_vector(gen, 0.5)};
    const Vec6 d = 1e-4 * (Vec6() << random_vector(gen, 1.0), random_vector(gen, 1.0)).finished();
    const Pose r2 = r1 * exp_se3(Vec3(d.head<3>()), Vec3(d.tail<3>()));
    const Twist v1{random_vector(gen, 1.0), random_vector(gen, 1.0), Frame::Body};
    const Twist v2 = Twist::from_vector(v1.vector() + 1e-3 * Vec6::Ones());
    const double jump = (slave_force(g, r2, v2, gs, vs) - slave_force(g, r1, v1, gs, vs)).norm();
    const double bound = 50.0 * (pose_error(gs, r2) - pose_error(gs, r1)).norm() + 5.0 * (v2.vector() - v1.vector()).norm();
    EXPECT_LE(jump, bound + 1e-12);
  }
}

TEST(SlaveGains, ValidationPerDofSet) {
  SlaveControllerGains g{Mat6::Identity(), Mat6::Identity()};
  g.k_p.topLeftCorner<3, 3>().setZero();
  g.k_d.topLeftCorner<3, 3>().setZero();
  EXPECT_NO_THROW(g.validate(DofSet::Translational));
  EXPECT_THROW(g.validate(DofSet::Full), NotSPD);
}

TEST(StepMaster, StaysOnTrajectoryWithoutFeedback) {
  const Pose target{exp_so3(Vec3(0.1, 0, 0)), Vec3(0.1, 0, 0)};
  OperatorScript s{[target](double) { return target; }, 100.0 * Mat6::Identity(), 10.0 * Mat6::Identity()};
  CartesianModel m(constant_inertia(Mat6::Identity()), Mat6::Zero(), DofSet::Full, target);
  for (int k = 0; k < 100; ++k) step_master(m, s, Vec6::Zero(), kDt);
  EXPECT_LE((m.pose().matrix() - target.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(StepMaster, OpposingFeedbackBalancesHand) {
  OperatorScript s{[](double) { return Pose::translation(Vec3(0.1, 0, 0)); }, 100.0 * Mat6::Identity(),
                   10.0 * Mat6::Identity()};
  CartesianModel free(constant_inertia(Mat6::Identity()), Mat6::Zero(), DofSet::Full, Pose::identity());
  CartesianModel held(constant_inertia(Mat6::Identity()), Mat6::Zero(), DofSet::Full, Pose::identity());
  step_master(free, s, Vec6::Zero(), kDt);
  step_master(held, s, -operator_force(held, s), kDt);
  EXPECT_GT(free.twist().v.x(), 0.0);
  EXPECT_EQ(held.twist().vector(), Vec6::Zero());
}

TEST(StepMaster, SinusoidTrackingMatchesSecondOrderResponse) {
  const double mass = 0.5, k = 200.0, d = 8.0, amp = 0.02, freq = 2.0;
  const double w = 2.0 * std::numbers::pi * freq;
  OperatorScript s{[=](double t) { return Pose::translation(Vec3(amp * std::sin(w * t), 0, 0)); },
                   k * Mat6::Identity(), d * Mat6::Identity()};
  CartesianModel m(constant_inertia(mass * Mat6::Identity()), Mat6::Zero(), DofSet::Translational,
                   Pose::identity());
  // Least-squares fit of x(t) = a sin(wt) + b cos(wt) over the last 3 s of 10 s.
  double ss = 0, sc = 0, cc = 0, xs = 0, xc = 0;
  for (int n = 0; n < 10000; ++n) {
    step_master(m, s, Vec6::Zero(), kDt);
    const double t = m.time();
    if (t < 7.0) continue;
    const double sn = std::sin(w * t), cs = std::cos(w * t), x = m.pose().p.x();
    ss += sn * sn;
    sc += sn * cs;
    cc += cs * cs;
    xs += x * sn;
    xc += x * cs;
  }
  const double det = ss * cc - sc * sc;
  const double a = (xs * cc - xc * sc) / det;
  const double b = (xc * ss - xs * sc) / det;
  const std::complex<double> h = k / std::complex<double>(k - mass * w * w, w * d);
  EXPECT_NEAR(std::hypot(a, b) / amp, std::abs(h), 0.01 * std::abs(h));
  EXPECT_NEAR(std::atan2(b, a), std::arg(h), 0.02);
}

TEST(Trajectory, WaypointsAndSines) {
  TrajectorySpec traj;
  traj.waypoints = {Waypoint{0.0, Vec3::Zero(), Vec3::Zero()}, Waypoint{1.0, Vec3(0.1, 0, 0), Vec3(0, 0, 0.2)}};
  EXPECT_EQ(traj.at(-1.0).p, Vec3::Zero());
  EXPECT_NEAR(traj.at(0.5).p.x(), 0.05, 1e-15);
  EXPECT_LE((traj.at(2.0).p - Vec3(0.1, 0, 0)).norm(), 1e-15);
  EXPECT_LE((log_so3(traj.at(2.0).r) - Vec3(0, 0, 0.2)).norm(), 1e-12);

  TrajectorySpec sine;
  sine.sines = {SineComponent{4, 0.1, 1.0, 0.0, 1.0, 3.0, 0.5}};
  EXPECT_EQ(sine.at(0.5).p.y(), 0.0);
  EXPECT_EQ(sine.at(3.5).p.y(), 0.0);
  EXPECT_NEAR(sine.at(2.25).p.y(), 0.1 * std::sin(2.0 * std::numbers::pi * 2.25), 1e-15);
  EXPECT_NEAR(sine.at(1.25).p.y(), 0.5 * 0.1 * std::sin(2.0 * std::numbers::pi * 1.25), 1e-15);
}
