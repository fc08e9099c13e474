#pragma once

// Per-tick loop of the position-forward / force-back architecture with
// passivity controllers on both ends and the drift compensator on the
// slave side, plus the scenario metrics computed from the tick stream.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "teleop/channel.hpp"
#include "teleop/drift.hpp"
#include "teleop/dynamics.hpp"
#include "teleop/tdpa.hpp"

namespace teleop {

struct DeviceConfig {
  InertiaSchedule lambda;
  Mat6 mu = Mat6::Zero();
};

struct ScenarioConfig {
  std::string name = "scenario";
  double dt = 1e-3;        // s
  double duration = 1.0;   // s
  std::uint64_t seed = 0;  // seeds every delay walk and loss sequence
  DofSet dofs = DofSet::Full;

  DelayProfile forward = DelayProfile::constant(0);
  DelayProfile backward = DelayProfile::constant(0);
  double loss_probability = 0.0;  // applied to both directions

  PcMode mode = PcMode::Concatenated;
  bool admittance_pc = true;
  bool impedance_pc = true;

  bool compensation = false;
  double k_r = 1.0;
  Vec3 k_t = Vec3::Ones();
  bool allow_divergent_gains = false;

  DeviceConfig master;
  DeviceConfig slave;
  SlaveControllerGains slave_gains;
  Mat6 hand_stiffness = Mat6::Zero();
  Mat6 hand_damping = Mat6::Zero();
  TrajectorySpec trajectory;

  std::int64_t ticks() const;
  CompGains gains() const { return CompGains(k_r, k_t, allow_divergent_gains); }

  // Throws ConfigError naming the offending key.
  void validate() const;
};

struct TickLog {
  std::int64_t tick = 0;
  double t = 0.0;

  Pose command;  // operator target
  Pose master;
  Twist v_m;
  Pose slave;
  Twist v_s;

  Vec6 v_tilde = Vec6::Zero();  // delayed master velocity
  Vec6 v_ad = Vec6::Zero();
  Vec6 v_pc = Vec6::Zero();
  Vec6 v_sd = Vec6::Zero();     // slave reference, slave-reference frame

  Vec6 f_s = Vec6::Zero();      // slave controller wrench
  Vec6 f_chan = Vec6::Zero();   // same wrench sent back, delayed-master frame
  Vec6 f_hat = Vec6::Zero();    // delayed wrench received at the master
  Vec6 f_m = Vec6::Zero();      // wrench applied against the master, after the impedance PC

  Observation w_m;
  Observation w_s;
  Vec6 diss_m = Vec6::Zero();
  Vec6 diss_s = Vec6::Zero();
  double diss_m_total = 0.0;
  double diss_s_total = 0.0;
  bool pc_m_active = false;
  bool pc_s_active = false;

  EnergyLedger ledger_m;
  EnergyLedger ledger_s;
  double e_pc_m_total = 0.0;
  double e_pc_s_total = 0.0;

  Vec3 phi_e = Vec3::Zero();
  Vec3 p_e = Vec3::Zero();
  bool rot_log_valid = true;
};

inline constexpr double kDriftZero = 1e-9;
inline constexpr double kDriftPresent = 1e-12;

struct Metrics {
  double terminal_drift_m = 0.0;
  double terminal_drift_rad = 0.0;
  Vec6 terminal_drift_axes = Vec6::Zero();  // |phi_e|, |p_e| per axis
  double peak_drift_m = 0.0;
  double peak_drift_rad = 0.0;
  Vec6 peak_drift_axes = Vec6::Zero();
  Vec6 peak_excursion_axes = Vec6::Zero();  // commanded, relative to the initial command

  // min over ticks of W + dissipated, both directions; per axis in
  // concatenated mode, totals in coupled mode.
  double min_post_pc_energy = 0.0;
  double max_force_norm = 0.0;   // linear part of F_s, N
  double max_torque_norm = 0.0;  // angular part of F_s, N m
  double position_rms_error = 0.0;

  // Ticks where the slave observer leaves room (W > 0) while drift is present.
  std::int64_t gap_count = 0;
  std::array<std::int64_t, 6> gap_count_axes{};
  std::int64_t pc_slave_ticks = 0;
  std::int64_t pc_master_ticks = 0;
  // Compensated ticks after the last slave PC action until the drift norm
  // fell below kDriftZero; -1 if it never did.
  std::int64_t steps_to_zero = -1;
  std::int64_t ticks = 0;
};

class MetricsAccumulator {
 public:
  explicit MetricsAccumulator(PcMode mode) : mode_(mode) {}

  void add(const TickLog& row);
  Metrics finish() const;

 private:
  PcMode mode_;
  Metrics m_;
  Vec6 prev_drift_ = Vec6::Zero();
  bool have_initial_command_ = false;
  Pose initial_command_;
  double sq_error_sum_ = 0.0;
  std::int64_t since_pc_ = 0;
  std::int64_t reached_ = -1;
  bool last_row_zero_ = true;
};

class Simulation {
 public:
  // Validates the configuration; throws ConfigError.
  explicit Simulation(const ScenarioConfig& cfg);

  TickLog step();
  bool done() const { return tick_ >= ticks_; }
  std::int64_t tick() const { return tick_; }

  const DriftState& drift() const { return drift_; }
  const CartesianModel& master() const { return master_; }
  const CartesianModel& slave() const { return slave_; }

 private:
  ScenarioConfig cfg_;
  std::int64_t ticks_;
  std::int64_t tick_ = 0;
  Vec6 mask_;
  OperatorScript script_;
  CartesianModel master_;
  CartesianModel slave_;
  DelayLine forward_;
  DelayLine backward_;
  EnergyLedger ledger_m_;
  EnergyLedger ledger_s_;
  PoState po_;
  DriftState drift_;
  CompGains gains_;
  Vec6 f_hat_last_ = Vec6::Zero();   // raw delayed wrench paired with the next master velocity
  Vec6 f_m_applied_ = Vec6::Zero();  // impedance-corrected wrench opposing the master
  Vec6 f_chan_last_ = Vec6::Zero();  // slave wrench in the delayed-master frame
};

using TickSink = std::function<void(const TickLog&)>;

// Runs a scenario to completion; every tick is handed to `sink` if given.
// Module errors are rethrown as SimulationError with the tick number.
Metrics run(const ScenarioConfig& cfg, const TickSink& sink = {});

struct SweepRow {
  CompGains gains;
  Metrics metrics;
};

// One compensated run per gain set with otherwise identical configuration.
// Runs are independent and execute concurrently.
std::vector<SweepRow> sweep(const ScenarioConfig& cfg, const std::vector<CompGains>& gains);

// Seed for an independent stream derived from a scenario seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace teleop
