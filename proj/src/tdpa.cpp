#include "teleop/tdpa.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "teleop/spd.hpp"

namespace teleop {

Observation observe(const Vec6& e_in_remote_delayed, double e_in_remote_delayed_total,
                    const EnergyLedger& local, const Vec6& e_pc_axes, double e_pc_total) {
  Observation w;
  w.axes = e_in_remote_delayed - local.e_out + e_pc_axes;
  w.total = observe(e_in_remote_delayed_total, local.out_total, e_pc_total);
  return w;
}

const Observation& PassivityObserver::update(const ChannelSample& remote, const EnergyLedger& local) {
  last_ = observe(remote.e_in, remote.e_in_total, local, e_pc_, e_pc_total_);
  return last_;
}

void PassivityObserver::record(const PcResult& pc) {
  if (!pc.active) return;
  e_pc_ += pc.dissipated;
  e_pc_total_ += pc.dissipated_total;
}

PcResult pc_admittance_concatenated(const Vec6& w_s_axes, const Vec6& f_s, const Vec6& v_tilde, double dt) {
  PcResult r;
  for (int i = 0; i < 6; ++i) {
    const double w = w_s_axes[i];
    const double f = f_s[i];
    if (w >= 0.0 || std::abs(f) <= kEffortGuard) continue;
    const double beta = -w / (dt * (f * f));
    r.correction[i] = beta * f;
    r.dissipated[i] = dt * (f * r.correction[i]);
    r.dissipated_total += r.dissipated[i];
    r.active = true;
  }
  r.corrected = v_tilde - r.correction;
  return r;
}

PcResult pc_admittance_coupled(double w_s_total, const Vec6& f_s, const Mat6& lambda_x, const Vec6& v_tilde,
                               double dt) {
  require_spd(lambda_x, "coupled PC inertia");
  PcResult r;
  r.corrected = v_tilde;
  if (w_s_total >= 0.0) return r;

  const Vec6 lambda_inv_f = lambda_x.llt().solve(f_s);
  const double norm2 = f_s.dot(lambda_inv_f);
  if (!(f_s.norm() > kEffortGuard) || !(norm2 > 0.0)) return r;

  const double d_f = -w_s_total / (dt * norm2);
  r.correction = d_f * lambda_inv_f;
  r.corrected = v_tilde - r.correction;
  r.dissipated_total = dt * f_s.dot(r.correction);
  r.active = true;
  return r;
}

PcResult pc_impedance_concatenated(const Vec6& w_m_axes, const Vec6& v_m, const Vec6& f_hat, double dt) {
  PcResult r;
  for (int i = 0; i < 6; ++i) {
    const double w = w_m_axes[i];
    const double v = v_m[i];
    if (w >= 0.0 || std::abs(v) <= kEffortGuard) continue;
    const double alpha = -w / (dt * (v * v));
    r.correction[i] = alpha * v;
    r.dissipated[i] = dt * (r.correction[i] * v);
    r.dissipated_total += r.dissipated[i];
    r.active = true;
  }
  r.corrected = f_hat + r.correction;
  return r;
}

PcResult pc_impedance_coupled(double w_m_total, const Vec6& v_m, const Vec6& f_hat, double dt) {
  PcResult r;
  r.corrected = f_hat;
  const double norm2 = v_m.squaredNorm();
  if (w_m_total >= 0.0 || !(norm2 > kEffortGuard * kEffortGuard)) return r;

  const double alpha = -w_m_total / (dt * norm2);
  r.correction = alpha * v_m;
  r.corrected = f_hat + r.correction;
  r.dissipated_total = dt * r.correction.dot(v_m);
  r.active = true;
  return r;
}

}  // namespace teleop
