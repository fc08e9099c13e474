#pragma once

// Passivity observers and passivity controllers.
//
// The observers add back the energy their controller has already removed:
//   W(k) = E_in_remote(k - T(k)) - E_out_local(k) + E_pc(k - 1).
// The admittance controllers (slave side) remove velocity along the slave
// force, the impedance controllers (master side) add damping force along the
// master velocity. Whenever a controller acts, it dissipates exactly -W.

#include "teleop/channel.hpp"
#include "teleop/liegroup.hpp"

namespace teleop {

// Guard on the effort/flow magnitude below which a controller stays idle and
// the deficit carries forward in the observer.
inline constexpr double kEffortGuard = 1e-9;

enum class PcMode { Concatenated, Coupled };

struct PcResult {
  // V_pc for admittance controllers, the added damping force for impedance.
  Vec6 correction = Vec6::Zero();
  // v_tilde - V_pc (admittance) or f_hat + f_pc (impedance).
  Vec6 corrected = Vec6::Zero();
  // Per-axis dissipation; left at zero by the coupled forms, which only
  // account for the total.
  Vec6 dissipated = Vec6::Zero();
  double dissipated_total = 0.0;
  bool active = false;
};

// Observed energy for one side, per axis and as a total.
struct Observation {
  Vec6 axes = Vec6::Zero();
  double total = 0.0;
};

Observation observe(const Vec6& e_in_remote_delayed, double e_in_remote_delayed_total,
                    const EnergyLedger& local, const Vec6& e_pc_axes, double e_pc_total);

inline double observe(double e_in_remote_delayed, double e_out_local, double e_pc_prev) {
  return e_in_remote_delayed - e_out_local + e_pc_prev;
}

// Observer state for one side of the network. Dissipation is folded in at
// the end of the tick so that W(k) sees E_pc(k - 1).
class PassivityObserver {
 public:
  const Observation& update(const ChannelSample& remote, const EnergyLedger& local);
  void record(const PcResult& pc);

  const Observation& last() const { return last_; }
  const Vec6& e_pc() const { return e_pc_; }
  double e_pc_total() const { return e_pc_total_; }

 private:
  Observation last_;
  Vec6 e_pc_ = Vec6::Zero();
  double e_pc_total_ = 0.0;
};

struct PoState {
  PassivityObserver master;
  PassivityObserver slave;
};

// Diagonal beta per axis: beta_i = -W_i / (dt F_i^2) when W_i < 0 and
// |F_i| > kEffortGuard.
PcResult pc_admittance_concatenated(const Vec6& w_s_axes, const Vec6& f_s, const Vec6& v_tilde, double dt);

// beta = d_f * lambda_x^-1 with d_f = -W / (dt F^T lambda_x^-1 F), idle
// unless |F| > kEffortGuard. Throws NotSPD if lambda_x is not symmetric
// positive definite.
PcResult pc_admittance_coupled(double w_s_total, const Vec6& f_s, const Mat6& lambda_x, const Vec6& v_tilde,
                               double dt);

// Per-axis damping alpha_i = -W_i / (dt v_i^2) added to the delayed force.
PcResult pc_impedance_concatenated(const Vec6& w_m_axes, const Vec6& v_m, const Vec6& f_hat, double dt);

// Single damping alpha = -W / (dt |v|^2) acting on all axes.
PcResult pc_impedance_coupled(double w_m_total, const Vec6& v_m, const Vec6& f_hat, double dt);

}  // namespace teleop
