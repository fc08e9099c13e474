#pragma once

// Device models: decoupled Cartesian dynamics Lambda_x dv/dt + mu_x v = F,
// a scripted operator driving the master through a hand impedance, and the
// slave-side PD controller whose wrench is fed back through the channel.

#include <functional>
#include <vector>

#include "teleop/liegroup.hpp"

namespace teleop {

enum class DofSet { Translational, Full };

// 1 on active axes, 0 on the rotational axes of a translational device.
Vec6 dof_mask(DofSet dofs);

// lambda(t) = base * (1 + amplitude * sin(2 pi t / period_s)); amplitude = 0
// gives a constant inertia. |amplitude| < 1 keeps it SPD.
struct InertiaSchedule {
  Mat6 base = Mat6::Identity();
  double amplitude = 0.0;
  double period_s = 1.0;

  Mat6 at(double t) const;
};

class CartesianModel {
 public:
  // Throws NotSPD if the inertia is not SPD, OutOfDomain for |amplitude| >= 1.
  CartesianModel(const InertiaSchedule& lambda, const Mat6& mu, DofSet dofs = DofSet::Full,
                 const Pose& initial = Pose::identity());

  // Semi-implicit Euler: v += dt lambda^-1 (F - mu v), then the pose is
  // integrated with the new body twist. Returns the new twist.
  Twist step(const Vec6& f, double dt);

  const Pose& pose() const { return pose_; }
  const Twist& twist() const { return twist_; }
  double time() const { return t_; }
  DofSet dofs() const { return dofs_; }
  const Vec6& mask() const { return mask_; }
  Mat6 lambda() const { return lambda_.at(t_); }
  const Mat6& mu() const { return mu_; }

  double kinetic_energy() const;

  void set_state(const Pose& pose, const Twist& twist);

 private:
  InertiaSchedule lambda_;
  Mat6 mu_;
  DofSet dofs_;
  Vec6 mask_;
  Pose pose_;
  Twist twist_;
  double t_ = 0.0;
};

inline Twist step_cartesian(CartesianModel& m, const Vec6& f, double dt) { return m.step(f, dt); }

// [log(R_from^T R_to); R_from^T (p_to - p_from)], the pose of `to` seen from
// `from` as a 6-vector. Throws NearPiRotation past the log domain.
Vec6 pose_error(const Pose& from, const Pose& to);

struct Waypoint {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 rotation = Vec3::Zero();  // rotation vector
};

struct SineComponent {
  int axis = 0;  // 0..5, angular first (rx, ry, rz, x, y, z)
  double amplitude = 0.0;
  double frequency_hz = 0.0;
  double phase_rad = 0.0;
  double start_s = 0.0;
  double end_s = 0.0;
  double ramp_s = 0.0;  // raised-cosine fade in/out
};

// Desired master pose: min-jerk blends between waypoints plus windowed sines.
struct TrajectorySpec {
  std::vector<Waypoint> waypoints;
  std::vector<SineComponent> sines;

  Pose at(double t) const;
};

struct OperatorScript {
  std::function<Pose(double)> trajectory;
  Mat6 k_h = Mat6::Zero();  // hand stiffness, N/m and N m/rad
  Mat6 d_h = Mat6::Zero();  // hand damping
};

// F_h = K_h pose_error(pose, trajectory(t)) - D_h v
Vec6 operator_force(const CartesianModel& m, const OperatorScript& script);

// Drives the master with F_h + f_feedback for one step.
Twist step_master(CartesianModel& m, const OperatorScript& script, const Vec6& f_feedback, double dt);

struct SlaveControllerGains {
  Mat6 k_p = Mat6::Identity();
  Mat6 k_d = Mat6::Identity();

  // Throws NotSPD. Only the block of active axes is checked, so a
  // translational device may leave its rotational gains at zero.
  void validate(DofSet dofs = DofSet::Full) const;
};

// Body-frame PD: F_s = K_p pose_error(g_s, g_ref) + K_d (v_ref - v_s).
Vec6 slave_force(const SlaveControllerGains& gains, const Pose& g_ref, const Twist& v_ref, const Pose& g_s,
                 const Twist& v_s);

}  // namespace teleop
