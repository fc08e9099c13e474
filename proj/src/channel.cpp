#include "teleop/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace teleop {

DelaySchedule::DelaySchedule(const DelayProfile& profile)
    : profile_(profile), gen_(profile.seed), walk_(profile.base_delay) {
  if (profile.base_delay < 0 || profile.amplitude < 0) {
    throw std::invalid_argument("delay profile: base delay and amplitude must be non-negative");
  }
  if (profile.kind == DelayKind::SinusoidalJitter && profile.period <= 0) {
    throw std::invalid_argument("delay profile: jitter period must be positive");
  }
}

int DelaySchedule::next(std::int64_t tick) {
  int d = profile_.base_delay;
  switch (profile_.kind) {
    case DelayKind::Constant:
      break;
    case DelayKind::SinusoidalJitter: {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(tick % profile_.period) / profile_.period;
      d = profile_.base_delay + static_cast<int>(std::lround(profile_.amplitude * std::sin(phase)));
      break;
    }
    case DelayKind::SeededRandomWalk: {
      const int step = static_cast<int>(gen_() % 3) - 1;
      walk_ = std::clamp(walk_ + step, profile_.base_delay - profile_.amplitude,
                         profile_.base_delay + profile_.amplitude);
      d = walk_;
      break;
    }
  }
  return std::max(d, 0);
}

DelayLine::DelayLine(const DelayProfile& delay, const LossModel& loss)
    : schedule_(delay), loss_(loss), loss_gen_(loss.seed) {
  if (!(loss.drop_probability >= 0.0 && loss.drop_probability < 1.0)) {
    throw std::invalid_argument("loss model: drop probability must lie in [0, 1)");
  }
}

void DelayLine::push(const ChannelSample& s) {
  if (s.tick <= last_tick_) {
    throw std::invalid_argument("DelayLine::push: tick " + std::to_string(s.tick) +
                                " not after previous tick " + std::to_string(last_tick_));
  }
  last_tick_ = s.tick;
  ++pushed_;

  // Both draws happen on every push so the loss sequence does not depend on
  // the delay profile and vice versa.
  const int delay = schedule_.next(s.tick);
  const bool drop = unit_interval(loss_gen_) < loss_.drop_probability;

  // No reordering: a sample never arrives before its predecessor.
  const std::int64_t arrival = std::max(s.tick + delay, last_arrival_);
  last_arrival_ = arrival;

  if (drop) {
    ++dropped_;
    return;
  }
  in_flight_.push_back(InFlight{arrival, s});
}

ChannelSample DelayLine::pop(std::int64_t k) {
  while (!in_flight_.empty() && in_flight_.front().arrival <= k) {
    held_ = in_flight_.front().sample;
    in_flight_.pop_front();
  }
  return held_;
}

void accumulate_port_energy(EnergyLedger& ledger, const Vec6& f, const Vec6& v, double dt, Port port) {
  for (int i = 0; i < 6; ++i) {
    const double fv = f[i] * v[i];
    const double p = port == Port::Left ? fv : -fv;
    if (p > 0.0) {
      const double e = dt * p;
      ledger.e_in[i] += e;
      ledger.in_total += e;
    } else {
      const double e = -dt * p;
      ledger.e_out[i] += e;
      ledger.out_total += e;
    }
  }
}

}  // namespace teleop
