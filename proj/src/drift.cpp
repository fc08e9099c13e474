#include "teleop/drift.hpp"

#include <cmath>
#include <string>

namespace teleop {

CompGains::CompGains(double k_r, const Vec3& k_t_diagonal, bool allow_divergent)
    : k_r_(k_r), k_t_(k_t_diagonal.asDiagonal()) {
  if (!std::isfinite(k_r) || !k_t_diagonal.allFinite()) {
    throw OutOfDomain("compensator gains must be finite");
  }
  if (allow_divergent) return;
  if (!(k_r > 0.0 && k_r < 2.0)) {
    throw OutOfDomain("k_r = " + std::to_string(k_r) + " outside the convergent range (0, 2)");
  }
  for (int i = 0; i < 3; ++i) {
    const double k = k_t_diagonal[i];
    if (!(k > 0.0 && k < 2.0)) {
      throw OutOfDomain("k_t[" + std::to_string(i) + "] = " + std::to_string(k) +
                        " outside the convergent range (0, 2)");
    }
  }
}

DriftState::DriftState(const Pose& g_dtilde, const Pose& g_d) : g_dtilde_(g_dtilde), g_d_(g_d) {
  recompute();
}

void DriftState::update_poses(const Twist& v_tilde, const Twist& v_sd, double dt) {
  g_dtilde_ = integrate_body(g_dtilde_, v_tilde, dt);
  g_d_ = integrate_body(g_d_, v_sd, dt);
  recompute();
}

void DriftState::recompute() {
  g_e_ = g_dtilde_.inverse() * g_d_;
  try {
    phi_e_ = log_so3(g_e_.r);
    rot_log_valid_ = true;
  } catch (const NearPiRotation&) {
    phi_e_.setZero();
    rot_log_valid_ = false;
  }
}

Vec6 DriftState::vector() const {
  Vec6 x;
  x << phi_e_, g_e_.p;
  return x;
}

Twist compensation_velocity(const DriftState& ds, const CompGains& gains, double dt) {
  if (!(dt > 0.0)) throw OutOfDomain("compensation_velocity: dt must be positive");
  Twist v_ad = Twist::zero(Frame::Body);
  if (ds.rot_log_valid()) v_ad.w = -(gains.k_r() / dt) * ds.phi_e();
  v_ad.v = -(1.0 / dt) * (a_inv_transpose(v_ad.w * dt) * (gains.k_t() * ds.p_e()));
  return v_ad;
}

Twist slave_reference_velocity(const Twist& v_tilde, const Twist& v_ad, const Twist& v_pc, const Pose& g_e) {
  const Vec6 u = v_tilde.vector() + v_ad.vector() - v_pc.vector();
  return Twist::from_vector(adjoint(g_e).inverse() * u, Frame::Body);
}

std::pair<Vec3, Vec3> predicted_drift_decay(const Vec3& phi_e, const Vec3& p_e, const CompGains& gains, double dt) {
  const Vec3 w_ad_dt = -(gains.k_r() / dt) * phi_e * dt;
  const Vec3 phi_next = (1.0 - gains.k_r()) * phi_e;
  const Vec3 p_next = exp_so3(w_ad_dt) * ((Mat3::Identity() - gains.k_t()) * p_e);
  return {phi_next, p_next};
}

}  // namespace teleop
