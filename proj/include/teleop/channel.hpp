#pragma once

// Time delay power network: two one-way delay lines (master to slave and
// back) with variable delay and packet loss, plus the per-port energy
// ledgers the passivity observers read.

#include <cstdint>
#include <deque>
#include <random>

#include "teleop/liegroup.hpp"

namespace teleop {

// One transmitted packet. payload carries a twist (forward) or a wrench
// (backward); e_in / e_in_total carry the sender's cumulative input energy
// so that the remote observer sees it with the same delay as the signal.
struct ChannelSample {
  std::int64_t tick = -1;
  Vec6 payload = Vec6::Zero();
  Vec6 e_in = Vec6::Zero();
  double e_in_total = 0.0;
};

enum class DelayKind { Constant, SinusoidalJitter, SeededRandomWalk };

struct DelayProfile {
  DelayKind kind = DelayKind::Constant;
  int base_delay = 0;      // samples
  int amplitude = 0;       // samples, jitter half-range
  int period = 1000;       // samples, SinusoidalJitter only
  std::uint64_t seed = 0;  // SeededRandomWalk only

  static DelayProfile constant(int samples) { return DelayProfile{DelayKind::Constant, samples, 0, 1000, 0}; }
};

struct LossModel {
  double drop_probability = 0.0;  // [0, 1)
  std::uint64_t seed = 0;
};

// Uniform double in [0, 1) from a 64-bit engine draw. Used instead of
// std::uniform_real_distribution, whose output is implementation-defined.
inline double unit_interval(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Produces the per-sample delay T(k) for consecutive pushes.
class DelaySchedule {
 public:
  explicit DelaySchedule(const DelayProfile& profile);

  // Delay (samples, >= 0) for the sample pushed at `tick`. Must be called
  // once per push, in push order.
  int next(std::int64_t tick);

 private:
  DelayProfile profile_;
  std::mt19937_64 gen_;
  int walk_ = 0;
};

class DelayLine {
 public:
  DelayLine(const DelayProfile& delay, const LossModel& loss);

  // Ticks must be strictly increasing; throws std::invalid_argument otherwise.
  void push(const ChannelSample& s);

  // Most recent sample that has arrived by tick k. Dropped or late samples
  // leave the previously delivered one in place (zero-order hold); before the
  // first delivery the result is an all-zero sample with tick -1.
  ChannelSample pop(std::int64_t k);

  std::int64_t pushed() const { return pushed_; }
  std::int64_t dropped() const { return dropped_; }

 private:
  struct InFlight {
    std::int64_t arrival;
    ChannelSample sample;
  };

  DelaySchedule schedule_;
  LossModel loss_;
  std::mt19937_64 loss_gen_;
  std::deque<InFlight> in_flight_;
  ChannelSample held_;
  std::int64_t last_tick_ = -1;
  std::int64_t last_arrival_ = -1;
  std::int64_t pushed_ = 0;
  std::int64_t dropped_ = 0;
};

enum class Port { Left, Right };

// Cumulative energies at one port, split by the per-axis power sign.
// Totals are running sums of the same per-axis increments.
struct EnergyLedger {
  Vec6 e_in = Vec6::Zero();
  Vec6 e_out = Vec6::Zero();
  double in_total = 0.0;
  double out_total = 0.0;
};

// Left port power is f.v, right port power is -f.v (positive = into the
// channel). Each axis adds dt*|p_i| to e_in or e_out depending on its sign.
void accumulate_port_energy(EnergyLedger& ledger, const Vec6& f, const Vec6& v, double dt, Port port);

inline double observed_energy(double e_in_remote_delayed, double e_out_local) {
  return e_in_remote_delayed - e_out_local;
}

inline Vec6 observed_energy(const Vec6& e_in_remote_delayed, const Vec6& e_out_local) {
  return e_in_remote_delayed - e_out_local;
}

}  // namespace teleop
