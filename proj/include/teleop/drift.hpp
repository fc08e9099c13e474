#pragma once

// SE(3) drift between the integrated delayed-master pose and the integrated
// slave-reference pose, and the velocity law that removes it whenever the
// passivity observer leaves room.

#include <utility>

#include "teleop/liegroup.hpp"

namespace teleop {

// Compensator gains. Convergence requires 0 < k_r < 2 and the eigenvalues
// of the diagonal k_t in (0, 2); the constructor enforces that unless
// allow_divergent is set.
class CompGains {
 public:
  CompGains(double k_r, const Vec3& k_t_diagonal, bool allow_divergent = false);

  static CompGains uniform(double k_r, double k_t, bool allow_divergent = false) {
    return CompGains(k_r, Vec3::Constant(k_t), allow_divergent);
  }

  double k_r() const { return k_r_; }
  const Mat3& k_t() const { return k_t_; }

 private:
  double k_r_;
  Mat3 k_t_;
};

class DriftState {
 public:
  DriftState() = default;
  // Starts from given integrated poses; g_e is recomputed from them.
  DriftState(const Pose& g_dtilde, const Pose& g_d);

  // Integrates both poses by one body-twist step and recomputes
  // g_e = g_dtilde^-1 g_d. A rotation drift at pi clears rot_log_valid and
  // zeroes phi_e instead of throwing.
  void update_poses(const Twist& v_tilde, const Twist& v_sd, double dt);

  const Pose& g_dtilde() const { return g_dtilde_; }
  const Pose& g_d() const { return g_d_; }
  const Pose& g_e() const { return g_e_; }
  const Vec3& phi_e() const { return phi_e_; }
  const Vec3& p_e() const { return g_e_.p; }
  bool rot_log_valid() const { return rot_log_valid_; }

  // Drift as a 6-vector [phi_e; p_e].
  Vec6 vector() const;

 private:
  void recompute();

  Pose g_dtilde_;
  Pose g_d_;
  Pose g_e_;
  Vec3 phi_e_ = Vec3::Zero();
  bool rot_log_valid_ = true;
};

// V_ad in the delayed-master frame, from the drift of the previous tick:
//   w_ad = -k_r phi_e / dt
//   v_ad = -A(w_ad dt)^-T K_T p_e / dt
Twist compensation_velocity(const DriftState& ds, const CompGains& gains, double dt);

// V_sd = Ad(g_e)^-1 (v_tilde + v_ad - v_pc), all inputs in the delayed-master
// frame, result a body twist of the slave reference frame.
Twist slave_reference_velocity(const Twist& v_tilde, const Twist& v_ad, const Twist& v_pc, const Pose& g_e);

// Closed-form next-step drift while only compensation acts:
//   phi' = (1 - k_r) phi,   p' = exp(w_ad dt) (I - K_T) p.
std::pair<Vec3, Vec3> predicted_drift_decay(const Vec3& phi_e, const Vec3& p_e, const CompGains& gains, double dt);

}  // namespace teleop
