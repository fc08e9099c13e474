#include "teleop/simrunner.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "teleop/spd.hpp"

namespace teleop {

namespace {

DelayProfile seeded(DelayProfile p, std::uint64_t seed) {
  p.seed = seed;
  return p;
}

void check_delay(const DelayProfile& p, const std::string& key) {
  if (p.base_delay < 0) throw ConfigError(key, "delay must be non-negative");
  if (p.amplitude < 0) throw ConfigError(key, "jitter amplitude must be non-negative");
  if (p.kind != DelayKind::Constant && p.amplitude > p.base_delay) {
    throw ConfigError(key, "jitter amplitude may not exceed the base delay");
  }
  if (p.kind == DelayKind::SinusoidalJitter && p.period <= 0) throw ConfigError(key, "jitter period must be positive");
}

void check_device(const DeviceConfig& d, const std::string& key) {
  if (!is_spd(d.lambda.base)) throw ConfigError(key + ".inertia", "inertia must be symmetric positive definite");
  if (!(std::abs(d.lambda.amplitude) < 1.0)) throw ConfigError(key + ".inertia_modulation", "must be below 1");
  if (d.lambda.amplitude != 0.0 && !(d.lambda.period_s > 0.0)) {
    throw ConfigError(key + ".inertia_modulation_period_s", "must be positive");
  }
  if (!d.mu.allFinite()) throw ConfigError(key + ".damping", "must be finite");
}

Mat6 masked(const Mat6& m, const Vec6& mask) { return mask.asDiagonal() * m * mask.asDiagonal(); }

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::int64_t ScenarioConfig::ticks() const { return std::llround(duration / dt); }

void ScenarioConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt_s", "must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("duration_s", "must be positive");
  const double n = duration / dt;
  if (std::abs(n - std::round(n)) > 1e-6) throw ConfigError("duration_s", "must be an integer multiple of dt_s");
  check_delay(forward, "channel.delay_forward_ms");
  check_delay(backward, "channel.delay_backward_ms");
  if (!(loss_probability >= 0.0 && loss_probability < 1.0)) {
    throw ConfigError("channel.loss_probability", "must lie in [0, 1)");
  }
  if (compensation) {
    try {
      (void)gains();
    } catch (const OutOfDomain& e) {
      throw ConfigError("compensation", e.what());
    }
  }
  check_device(master, "master");
  check_device(slave, "slave");
  try {
    slave_gains.validate(dofs);
  } catch (const NotSPD& e) {
    throw ConfigError("slave", e.what());
  }
  for (std::size_t i = 1; i < trajectory.waypoints.size(); ++i) {
    if (!(trajectory.waypoints[i].t > trajectory.waypoints[i - 1].t)) {
      throw ConfigError("operator.waypoints", "waypoint times must be strictly increasing");
    }
  }
  for (const SineComponent& s : trajectory.sines) {
    if (s.axis < 0 || s.axis > 5) throw ConfigError("operator.sine.axis", "must name one of the six axes");
    if (s.end_s < s.start_s) throw ConfigError("operator.sine.end_s", "must not precede start_s");
  }
}

Simulation::Simulation(const ScenarioConfig& cfg)
    : cfg_((cfg.validate(), cfg)),
      ticks_(cfg.ticks()),
      mask_(dof_mask(cfg.dofs)),
      master_(cfg.master.lambda, cfg.master.mu, cfg.dofs),
      slave_(cfg.slave.lambda, cfg.slave.mu, cfg.dofs),
      forward_(seeded(cfg.forward, derive_seed(cfg.seed, 1)),
               LossModel{cfg.loss_probability, derive_seed(cfg.seed, 3)}),
      backward_(seeded(cfg.backward, derive_seed(cfg.seed, 2)),
                LossModel{cfg.loss_probability, derive_seed(cfg.seed, 4)}),
      gains_(cfg.compensation ? cfg.gains() : CompGains::uniform(1.0, 1.0)) {
  script_.trajectory = [traj = cfg_.trajectory](double t) { return traj.at(t); };
  script_.k_h = masked(cfg_.hand_stiffness, mask_);
  script_.d_h = masked(cfg_.hand_damping, mask_);
  cfg_.slave_gains.k_p = masked(cfg_.slave_gains.k_p, mask_);
  cfg_.slave_gains.k_d = masked(cfg_.slave_gains.k_d, mask_);
}

TickLog Simulation::step() {
  const std::int64_t k = tick_;
  const double dt = cfg_.dt;
  TickLog log;
  log.tick = k;
  log.t = static_cast<double>(k) * dt;

  // Master: operator force plus the impedance-corrected feedback from the
  // previous tick, then the master port pair (last raw wrench, new velocity).
  log.command = script_.trajectory(master_.time());
  const Twist v_m = step_master(master_, script_, -f_m_applied_, dt);
  accumulate_port_energy(ledger_m_, f_hat_last_, v_m.vector(), dt, Port::Left);
  forward_.push(ChannelSample{k, v_m.vector(), ledger_m_.e_in, ledger_m_.in_total});

  // Slave side, in the delayed-master frame until the adjoint map.
  const ChannelSample fwd = forward_.pop(k);
  const Twist v_tilde = Twist::from_vector(fwd.payload, Frame::Body);
  Twist v_ad = Twist::zero(Frame::Body);
  if (cfg_.compensation) {
    v_ad = Twist::from_vector(mask_.cwiseProduct(compensation_velocity(drift_, gains_, dt).vector()), Frame::Body);
  }
  const Vec6 v_checked = v_tilde.vector() + v_ad.vector();
  accumulate_port_energy(ledger_s_, f_chan_last_, v_checked, dt, Port::Right);
  const Observation w_s = po_.slave.update(fwd, ledger_s_);

  const AdjointMatrix ad_prev = adjoint(drift_.g_e());
  PcResult pc_s;
  pc_s.corrected = v_checked;
  if (cfg_.admittance_pc) {
    if (cfg_.mode == PcMode::Concatenated) {
      pc_s = pc_admittance_concatenated(w_s.axes, f_chan_last_, v_checked, dt);
    } else {
      // Slave inertia seen from the delayed-master frame.
      const Mat6 ad_inv = ad_prev.inverse();
      Mat6 lambda = ad_inv.transpose() * slave_.lambda() * ad_inv;
      lambda = 0.5 * (lambda + lambda.transpose());
      pc_s = pc_admittance_coupled(w_s.total, f_chan_last_, lambda, v_checked, dt);
    }
    pc_s.correction = mask_.cwiseProduct(pc_s.correction);
    pc_s.corrected = v_checked - pc_s.correction;
  }
  const Twist v_pc = Twist::from_vector(pc_s.correction, Frame::Body);
  const Twist v_sd = slave_reference_velocity(v_tilde, v_ad, v_pc, drift_.g_e());
  drift_.update_poses(v_tilde, v_sd, dt);

  const Vec6 f_s =
      mask_.cwiseProduct(slave_force(cfg_.slave_gains, drift_.g_d(), v_sd, slave_.pose(), slave_.twist()));
  slave_.step(f_s, dt);
  const Vec6 f_chan = mask_.cwiseProduct(adjoint(drift_.g_e()).inverse_transpose() * f_s);
  backward_.push(ChannelSample{k, f_chan, ledger_s_.e_in, ledger_s_.in_total});

  // Master port observer and impedance PC on the freshly delivered wrench.
  const ChannelSample bwd = backward_.pop(k);
  const Observation w_m = po_.master.update(bwd, ledger_m_);
  PcResult pc_m;
  pc_m.corrected = bwd.payload;
  if (cfg_.impedance_pc) {
    pc_m = cfg_.mode == PcMode::Concatenated ? pc_impedance_concatenated(w_m.axes, v_m.vector(), bwd.payload, dt)
                                             : pc_impedance_coupled(w_m.total, v_m.vector(), bwd.payload, dt);
  }
  f_m_applied_ = pc_m.corrected;
  f_hat_last_ = bwd.payload;
  f_chan_last_ = f_chan;

  po_.slave.record(pc_s);
  po_.master.record(pc_m);

  log.master = master_.pose();
  log.v_m = v_m;
  log.slave = slave_.pose();
  log.v_s = slave_.twist();
  log.v_tilde = v_tilde.vector();
  log.v_ad = v_ad.vector();
  log.v_pc = v_pc.vector();
  log.v_sd = v_sd.vector();
  log.f_s = f_s;
  log.f_chan = f_chan;
  log.f_hat = bwd.payload;
  log.f_m = f_m_applied_;
  log.w_m = w_m;
  log.w_s = w_s;
  log.diss_m = pc_m.dissipated;
  log.diss_s = pc_s.dissipated;
  log.diss_m_total = pc_m.dissipated_total;
  log.diss_s_total = pc_s.dissipated_total;
  log.pc_m_active = pc_m.active;
  log.pc_s_active = pc_s.active;
  log.ledger_m = ledger_m_;
  log.ledger_s = ledger_s_;
  log.e_pc_m_total = po_.master.e_pc_total();
  log.e_pc_s_total = po_.slave.e_pc_total();
  log.phi_e = drift_.phi_e();
  log.p_e = drift_.p_e();
  log.rot_log_valid = drift_.rot_log_valid();

  ++tick_;
  return log;
}

void MetricsAccumulator::add(const TickLog& row) {
  if (!have_initial_command_) {
    initial_command_ = row.command;
    have_initial_command_ = true;
  }
  ++m_.ticks;

  Vec6 drift;
  drift << row.phi_e, row.p_e;
  const Vec6 drift_abs = drift.cwiseAbs();
  m_.terminal_drift_axes = drift_abs;
  m_.terminal_drift_rad = row.phi_e.norm();
  m_.terminal_drift_m = row.p_e.norm();
  m_.peak_drift_axes = m_.peak_drift_axes.cwiseMax(drift_abs);
  m_.peak_drift_rad = std::max(m_.peak_drift_rad, m_.terminal_drift_rad);
  m_.peak_drift_m = std::max(m_.peak_drift_m, m_.terminal_drift_m);

  Vec6 excursion;
  const Pose rel = initial_command_.inverse() * row.command;
  excursion << log_so3(rel.r), row.command.p - initial_command_.p;
  m_.peak_excursion_axes = m_.peak_excursion_axes.cwiseMax(excursion.cwiseAbs());

  double post = 0.0;
  if (mode_ == PcMode::Concatenated) {
    post = std::min((row.w_s.axes + row.diss_s).minCoeff(), (row.w_m.axes + row.diss_m).minCoeff());
  } else {
    post = std::min(row.w_s.total + row.diss_s_total, row.w_m.total + row.diss_m_total);
  }
  m_.min_post_pc_energy = m_.ticks == 1 ? post : std::min(m_.min_post_pc_energy, post);

  m_.max_force_norm = std::max(m_.max_force_norm, row.f_s.tail<3>().norm());
  m_.max_torque_norm = std::max(m_.max_torque_norm, row.f_s.head<3>().norm());
  sq_error_sum_ += (row.master.p - row.slave.p).squaredNorm();

  bool any_gap = false;
  for (int i = 0; i < 6; ++i) {
    const double w = mode_ == PcMode::Concatenated ? row.w_s.axes[i] : row.w_s.total;
    if (w > 0.0 && std::abs(prev_drift_[i]) > kDriftPresent) {
      ++m_.gap_count_axes[static_cast<std::size_t>(i)];
      any_gap = true;
    }
  }
  if (any_gap) ++m_.gap_count;
  if (row.pc_s_active) ++m_.pc_slave_ticks;
  if (row.pc_m_active) ++m_.pc_master_ticks;

  const double drift_norm = drift.norm();
  if (row.pc_s_active) {
    since_pc_ = 0;
    reached_ = -1;
  } else if (!row.v_ad.isZero(0.0)) {
    ++since_pc_;
    if (reached_ < 0 && drift_norm <= kDriftZero) reached_ = since_pc_;
  }
  last_row_zero_ = drift_norm <= kDriftZero;
  prev_drift_ = drift;
}

Metrics MetricsAccumulator::finish() const {
  Metrics out = m_;
  out.position_rms_error = m_.ticks > 0 ? std::sqrt(sq_error_sum_ / static_cast<double>(m_.ticks)) : 0.0;
  out.steps_to_zero = last_row_zero_ ? std::max<std::int64_t>(reached_, 0) : -1;
  return out;
}

Metrics run(const ScenarioConfig& cfg, const TickSink& sink) {
  Simulation sim(cfg);
  MetricsAccumulator acc(cfg.mode);
  while (!sim.done()) {
    TickLog row;
    try {
      row = sim.step();
    } catch (const SimulationError&) {
      throw;
    } catch (const Error& e) {
      throw SimulationError(sim.tick(), e.what());
    }
    acc.add(row);
    if (sink) sink(row);
  }
  return acc.finish();
}

std::vector<SweepRow> sweep(const ScenarioConfig& cfg, const std::vector<CompGains>& gains) {
  std::vector<std::future<Metrics>> jobs;
  jobs.reserve(gains.size());
  for (const CompGains& g : gains) {
    ScenarioConfig c = cfg;
    c.compensation = true;
    c.k_r = g.k_r();
    c.k_t = g.k_t().diagonal();
    c.allow_divergent_gains = true;  // already validated by the CompGains constructor
    jobs.push_back(std::async(std::launch::async, [c] { return run(c); }));
  }
  std::vector<SweepRow> rows;
  rows.reserve(gains.size());
  for (std::size_t i = 0; i < gains.size(); ++i) rows.push_back(SweepRow{gains[i], jobs[i].get()});
  return rows;
}

}  // namespace teleop
