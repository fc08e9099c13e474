#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "teleop/channel.hpp"

using namespace teleop;

namespace {

ChannelSample sample(std::int64_t tick, double x) {
  ChannelSample s;
  s.tick = tick;
  s.payload[0] = x;
  s.e_in[0] = x;
  s.e_in_total = x;
  return s;
}

}  // namespace

TEST(DelayLine, ConstantDelayShiftsRamp) {
  DelayLine line(DelayProfile::constant(200), LossModel{});
  for (std::int64_t k = 0; k < 1000; ++k) {
    line.push(sample(k, static_cast<double>(k)));
    const ChannelSample s = line.pop(k);
    EXPECT_EQ(s.payload[0], static_cast<double>(std::max<std::int64_t>(k - 200, 0)));
    EXPECT_EQ(s.tick, k >= 200 ? k - 200 : -1);
  }
}

TEST(DelayLine, OneSampleDelay) {
  DelayLine line(DelayProfile::constant(1), LossModel{});
  std::mt19937_64 gen(3);
  std::vector<double> sent;
  for (std::int64_t k = 0; k < 500; ++k) {
    sent.push_back(unit_interval(gen));
    line.push(sample(k, sent.back()));
    const ChannelSample s = line.pop(k);
    if (k == 0) {
      EXPECT_EQ(s.tick, -1);
      EXPECT_EQ(s.payload, Vec6::Zero());
    } else {
      EXPECT_EQ(s.payload[0], sent[static_cast<std::size_t>(k - 1)]);
    }
  }
}

TEST(DelayLine, ZeroDelayDeliversSameTick) {
  DelayLine line(DelayProfile::constant(0), LossModel{});
  for (std::int64_t k = 0; k < 10; ++k) {
    line.push(sample(k, k * 2.0));
    EXPECT_EQ(line.pop(k).payload[0], k * 2.0);
  }
}

TEST(DelayLine, LossMatchesBernoulliReplay) {
  const std::uint64_t seed = 1234;
  const double p = 0.1;
  const int delay = 5;
  DelayLine line(DelayProfile::constant(delay), LossModel{p, seed});

  // Replay of the same seeded Bernoulli sequence: one draw per push.
  std::mt19937_64 oracle(seed);
  std::vector<bool> dropped;
  const int n = 20000;
  for (int k = 0; k < n; ++k) dropped.push_back(static_cast<double>(oracle() >> 11) * 0x1.0p-53 < p);

  double expected = 0.0;
  std::int64_t expected_tick = -1;
  int drops = 0;
  for (int k = 0; k < n; ++k) {
    line.push(sample(k, k + 1.0));
    const int src = k - delay;
    if (src >= 0 && !dropped[static_cast<std::size_t>(src)]) {
      expected = src + 1.0;
      expected_tick = src;
    }
    const ChannelSample s = line.pop(k);
    ASSERT_EQ(s.payload[0], expected) << "tick " << k;
    ASSERT_EQ(s.tick, expected_tick);
    drops += dropped[static_cast<std::size_t>(k)] ? 1 : 0;
  }
  EXPECT_EQ(line.dropped(), drops);
  EXPECT_EQ(line.pushed(), n);
  EXPECT_NEAR(static_cast<double>(drops) / n, p, 0.01);
}

TEST(DelayLine, DeterministicGivenSeeds) {
  DelayProfile walk{DelayKind::SeededRandomWalk, 100, 20, 1000, 77};
  DelayLine a(walk, LossModel{0.2, 5});
  DelayLine b(walk, LossModel{0.2, 5});
  for (std::int64_t k = 0; k < 5000; ++k) {
    a.push(sample(k, std::sin(0.01 * k)));
    b.push(sample(k, std::sin(0.01 * k)));
    const ChannelSample sa = a.pop(k);
    const ChannelSample sb = b.pop(k);
    ASSERT_EQ(sa.tick, sb.tick);
    ASSERT_EQ(sa.payload, sb.payload);
  }
}

TEST(DelayLine, VariableDelayNeverReorders) {
  for (DelayKind kind : {DelayKind::SinusoidalJitter, DelayKind::SeededRandomWalk}) {
    DelayLine line(DelayProfile{kind, 30, 25, 97, 9}, LossModel{});
    std::int64_t last = -1;
    for (std::int64_t k = 0; k < 5000; ++k) {
      line.push(sample(k, 0.0));
      const std::int64_t t = line.pop(k).tick;
      ASSERT_GE(t, last);
      ASSERT_LE(t, k);
      last = t;
    }
  }
}

TEST(DelaySchedule, RandomWalkStaysInBand) {
  DelaySchedule s(DelayProfile{DelayKind::SeededRandomWalk, 50, 10, 1000, 3});
  int lo = 1000, hi = -1;
  for (std::int64_t k = 0; k < 20000; ++k) {
    const int d = s.next(k);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  EXPECT_GE(lo, 40);
  EXPECT_LE(hi, 60);
  EXPECT_LT(lo, 50);
  EXPECT_GT(hi, 50);
}

TEST(DelaySchedule, SinusoidalJitterFollowsSine) {
  DelaySchedule s(DelayProfile{DelayKind::SinusoidalJitter, 100, 20, 400, 0});
  EXPECT_EQ(s.next(0), 100);
  EXPECT_EQ(s.next(100), 120);
  EXPECT_EQ(s.next(300), 80);
}

TEST(DelayLine, RejectsNonIncreasingTicks) {
  DelayLine line(DelayProfile::constant(1), LossModel{});
  line.push(sample(3, 0.0));
  EXPECT_THROW(line.push(sample(3, 0.0)), std::invalid_argument);
  EXPECT_THROW(line.push(sample(2, 0.0)), std::invalid_argument);
  EXPECT_THROW(DelayLine(DelayProfile::constant(1), LossModel{1.0, 0}), std::invalid_argument);
}

TEST(PortEnergy, ZeroForceLeavesLedger) {
  EnergyLedger l;
  Vec6 v = Vec6::Constant(3.0);
  accumulate_port_energy(l, Vec6::Zero(), v, 0.001, Port::Left);
  EXPECT_EQ(l.e_in, Vec6::Zero());
  EXPECT_EQ(l.e_out, Vec6::Zero());
  EXPECT_EQ(l.in_total, 0.0);
  EXPECT_EQ(l.out_total, 0.0);
}

TEST(PortEnergy, LeftPortInput) {
  EnergyLedger l;
  Vec6 f = Vec6::Zero(), v = Vec6::Zero();
  f[0] = 2.0;
  v[0] = 3.0;
  accumulate_port_energy(l, f, v, 0.001, Port::Left);
  EXPECT_DOUBLE_EQ(l.e_in[0], 0.006);
  EXPECT_EQ(l.e_out[0], 0.0);
  EnergyLedger r;
  accumulate_port_energy(r, f, v, 0.001, Port::Right);
  EXPECT_DOUBLE_EQ(r.e_out[0], 0.006);
  EXPECT_EQ(r.e_in[0], 0.0);
}

TEST(PortEnergy, DecompositionMonotonicityAndTotals) {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> n(0.0, 1.0);
  for (Port port : {Port::Left, Port::Right}) {
    EnergyLedger l;
    Vec6 signed_sum = Vec6::Zero();
    const double dt = 0.001;
    for (int k = 0; k < 5000; ++k) {
      Vec6 f, v;
      for (int i = 0; i < 6; ++i) {
        f[i] = n(gen);
        v[i] = n(gen);
      }
      const EnergyLedger before = l;
      accumulate_port_energy(l, f, v, dt, port);
      const double sign = port == Port::Left ? 1.0 : -1.0;
      signed_sum += sign * dt * f.cwiseProduct(v);
      ASSERT_TRUE((l.e_in.array() >= before.e_in.array()).all());
      ASSERT_TRUE((l.e_out.array() >= before.e_out.array()).all());
    }
    EXPECT_LE(((l.e_in - l.e_out) - signed_sum).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(l.in_total, l.e_in.sum(), 1e-12);
    EXPECT_NEAR(l.out_total, l.e_out.sum(), 1e-12);
  }
}

TEST(ObservedEnergy, Subtraction) {
  EXPECT_DOUBLE_EQ(observed_energy(0.5, 0.2), 0.3);
  Vec6 a = Vec6::Constant(0.5), b = Vec6::Constant(0.2);
  EXPECT_EQ(observed_energy(a, b), a - b);
}

TEST(ObservedEnergy, ZeroDelayIdealTransmissionIsZero) {
  // Velocity travels left to right, the force comes back unchanged; both
  // lines have zero delay, so each side's input is the other side's output.
  DelayLine fwd(DelayProfile::constant(0), LossModel{});
  DelayLine bwd(DelayProfile::constant(0), LossModel{});
  EnergyLedger left, right;
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n(0.0, 1.0);
  const double dt = 0.001;
  for (std::int64_t k = 0; k < 3000; ++k) {
    Vec6 v, f;
    for (int i = 0; i < 6; ++i) {
      v[i] = n(gen);
      f[i] = n(gen);
    }
    accumulate_port_energy(left, f, v, dt, Port::Left);
    accumulate_port_energy(right, f, v, dt, Port::Right);
    fwd.push(ChannelSample{k, v, left.e_in, left.in_total});
    bwd.push(ChannelSample{k, f, right.e_in, right.in_total});
    const ChannelSample at_right = fwd.pop(k);
    const ChannelSample at_left = bwd.pop(k);
    ASSERT_LE(std::abs(observed_energy(at_right.e_in_total, right.out_total)), 1e-12);
    ASSERT_LE(std::abs(observed_energy(at_left.e_in_total, left.out_total)), 1e-12);
    ASSERT_LE(observed_energy(at_right.e_in, right.e_out).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ObservedEnergy, VelocityStepDipsNegativeUnderDelay) {
  // Master velocity steps to 1 m/s at k = 0; the slave resists with a
  // damper f = b * v_delayed. The slave port releases energy from k = 200
  // on, while the matching master input needs another 200 ticks to arrive
  // and 200 more to be reported back.
  const int delay = 200;
  const double b = 3.0, dt = 0.001;
  DelayLine fwd(DelayProfile::constant(delay), LossModel{});
  DelayLine bwd(DelayProfile::constant(delay), LossModel{});
  EnergyLedger master, slave;
  for (std::int64_t k = 0; k < 1200; ++k) {
    const Vec6 v_m = Vec6::Unit(3);
    const Vec6 f_hat = bwd.pop(k).payload;
    accumulate_port_energy(master, f_hat, v_m, dt, Port::Left);
    fwd.push(ChannelSample{k, v_m, master.e_in, master.in_total});
    const ChannelSample at_slave = fwd.pop(k);
    const Vec6 f_s = b * at_slave.payload;
    accumulate_port_energy(slave, f_s, at_slave.payload, dt, Port::Right);
    bwd.push(ChannelSample{k, f_s, slave.e_in, slave.in_total});

    const double w = observed_energy(at_slave.e_in_total, slave.out_total);
    double oracle = 0.0;
    if (k >= 200) oracle -= dt * b * static_cast<double>(k - 199);
    if (k >= 600) oracle += dt * b * static_cast<double>(k - 599);
    ASSERT_NEAR(w, oracle, 1e-12) << "tick " << k;
  }
}
