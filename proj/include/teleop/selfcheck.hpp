#pragma once

// Invariant suites shared by the `check` subcommand and the acceptance
// binary.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "teleop/drift.hpp"

namespace teleop {

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Suite {
  std::string name;
  std::function<SuiteResult()> run;
};

const std::vector<Suite>& self_check_suites();
std::vector<SuiteResult> run_self_checks();

// Drift driven only by the compensator (zero master motion, PC inactive):
// returns [phi_e; p_e] after each of n steps, index 0 being the start.
std::vector<Vec6> compensated_drift_trace(const Pose& g_e0, const CompGains& gains, double dt, int n);

// Seeded rotation vector with norm below max_norm.
Vec3 random_rotation_vector(std::mt19937_64& gen, double max_norm);
// Components uniform in [-scale, scale).
Vec3 random_vector(std::mt19937_64& gen, double scale);

inline constexpr double kExpLogTol = 1e-9;
inline constexpr double kAInvTransposeTol = 1e-10;
inline constexpr double kDecayTol = 1e-7;
inline constexpr double kZeroingTol = 1e-9;
inline constexpr double kDissipationTol = 1e-12;

}  // namespace teleop
