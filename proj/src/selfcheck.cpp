#include "teleop/selfcheck.hpp"

#include <cmath>
#include <sstream>

#include "teleop/simrunner.hpp"
#include "teleop/tdpa.hpp"

namespace teleop {

namespace {

constexpr double kDt = 1e-3;
constexpr std::uint64_t kSeed = 20240611;

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

SuiteResult result(std::string name, bool pass, std::string detail) {
  return SuiteResult{std::move(name), pass, std::move(detail)};
}

SuiteResult hat_vee_roundtrip() {
  std::mt19937_64 gen(kSeed);
  double worst = 0.0;
  bool skew = true;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 v = random_vector(gen, 10.0);
    const Mat3 m = hat(v);
    skew = skew && (m + m.transpose()).isZero(0.0);
    worst = std::max(worst, (vee(m) - v).cwiseAbs().maxCoeff());
  }
  return result("hat_vee_roundtrip", skew && worst == 0.0, "max error " + sci(worst));
}

SuiteResult exp_log_roundtrip() {
  std::mt19937_64 gen(kSeed + 1);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Vec3 phi = random_rotation_vector(gen, M_PI - 1e-6);
    worst = std::max(worst, (log_so3(exp_so3(phi)) - phi).norm());
  }
  return result("exp_log_roundtrip", worst <= kExpLogTol, "max error " + sci(worst));
}

SuiteResult a_inv_transpose_identity() {
  std::mt19937_64 gen(kSeed + 2);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Vec3 phi = random_rotation_vector(gen, M_PI - 1e-6);
    const Mat3 lhs = a_inv_transpose(phi);
    const Mat3 rhs = a_inv(phi) * exp_so3(phi).matrix();
    worst = std::max(worst, (lhs - rhs).cwiseAbs().rowwise().sum().maxCoeff());
  }
  return result("A_inv_transpose_identity", worst <= kAInvTransposeTol, "max inf-norm " + sci(worst));
}

SuiteResult adjoint_inverse() {
  std::mt19937_64 gen(kSeed + 3);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Pose g{exp_so3(random_rotation_vector(gen, 3.0)), random_vector(gen, 2.0)};
    const AdjointMatrix ad = adjoint(g);
    worst = std::max(worst, (ad.matrix() * adjoint(g.inverse()).matrix() - Mat6::Identity()).cwiseAbs().maxCoeff());
    worst = std::max(worst, (ad.inverse().matrix() - adjoint(g.inverse()).matrix()).cwiseAbs().maxCoeff());
  }
  return result("adjoint_inverse", worst <= 1e-12, "max error " + sci(worst));
}

SuiteResult geometric_decay_k_r() {
  std::mt19937_64 gen(kSeed + 4);
  double worst_ratio = 0.0;
  double worst_rel = 0.0;
  double worst_trans = 0.0;
  for (double k_r : {0.25, 0.5, 1.0, 1.5, 1.75}) {
    const Vec3 k_t(0.25 + k_r / 2.0, 0.9, 1.6);
    const CompGains gains(k_r, k_t);
    const Vec3 phi0 = random_rotation_vector(gen, 2.5);
    const Vec3 p0 = random_vector(gen, 0.1);
    const std::vector<Vec6> trace = compensated_drift_trace(Pose{exp_so3(phi0), p0}, gains, kDt, 50);
    const double n0 = trace[0].head<3>().norm();
    Vec3 phi = trace[0].head<3>();
    Vec3 p = p0;
    for (int n = 1; n <= 50; ++n) {
      const double expected = std::pow(std::abs(1.0 - k_r), n);
      const double ratio = trace[static_cast<std::size_t>(n)].head<3>().norm() / n0;
      worst_ratio = std::max(worst_ratio, std::abs(ratio - expected));
      if (expected >= 1e-6) worst_rel = std::max(worst_rel, std::abs(ratio - expected) / expected);
      std::tie(phi, p) = predicted_drift_decay(phi, p, gains, kDt);
      worst_trans = std::max(worst_trans, (trace[static_cast<std::size_t>(n)].tail<3>() - p).norm() / p0.norm());
    }
  }
  const bool pass = worst_ratio <= kDecayTol && worst_rel <= kDecayTol && worst_trans <= kDecayTol;
  return result("geometric_decay_k_r", pass,
                "ratio error " + sci(worst_ratio) + ", relative " + sci(worst_rel) + ", translational " +
                    sci(worst_trans));
}

SuiteResult one_step_zeroing() {
  std::mt19937_64 gen(kSeed + 5);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Pose g_e{exp_so3(random_rotation_vector(gen, M_PI - 0.1)), random_vector(gen, 1.0)};
    const Vec6 after = compensated_drift_trace(g_e, CompGains::uniform(1.0, 1.0), kDt, 1)[1];
    worst = std::max(worst, std::max(after.head<3>().norm(), after.tail<3>().norm()));
  }
  return result("one_step_zeroing", worst <= kZeroingTol, "max residual " + sci(worst));
}

SuiteResult exact_dissipation() {
  std::mt19937_64 gen(kSeed + 6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto vec6 = [&] {
    Vec6 v;
    for (int i = 0; i < 6; ++i) v[i] = u(gen);
    return v;
  };
  double worst = 0.0;
  int acted = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec6 w = 0.01 * vec6();
    const Vec6 f = 10.0 * vec6();
    const Vec6 v = vec6();
    const double w_total = w.sum();
    Mat6 a;
    for (int c = 0; c < 6; ++c) a.col(c) = vec6();
    const Mat6 lam = a * a.transpose() + Mat6::Identity();

    const PcResult rs[4] = {pc_admittance_concatenated(w, f, v, kDt),
                            pc_admittance_coupled(w_total, f, lam, v, kDt),
                            pc_impedance_concatenated(w, v, f, kDt), pc_impedance_coupled(w_total, v, f, kDt)};
    for (int k = 0; k < 4; ++k) {
      const PcResult& r = rs[k];
      if (!r.active) continue;
      ++acted;
      if (k == 0 || k == 2) {
        for (int j = 0; j < 6; ++j) {
          if (w[j] < 0.0) worst = std::max(worst, std::abs(r.dissipated[j] + w[j]));
        }
      } else {
        worst = std::max(worst, std::abs(r.dissipated_total + w_total));
      }
    }
  }
  return result("exact_dissipation", acted > 0 && worst <= kDissipationTol,
                std::to_string(acted) + " activations, max mismatch " + sci(worst));
}

SuiteResult channel_zero_delay_energy() {
  ScenarioConfig cfg;
  cfg.name = "zero_delay";
  cfg.duration = 2.0;
  cfg.hand_stiffness = 50.0 * Mat6::Identity();
  cfg.hand_damping = 2.0 * Mat6::Identity();
  cfg.slave_gains.k_p = 200.0 * Mat6::Identity();
  cfg.slave_gains.k_d = 5.0 * Mat6::Identity();
  cfg.trajectory.sines = {SineComponent{3, 0.05, 1.0, 0.0, 0.0, 2.0, 0.2},
                          SineComponent{1, 0.2, 0.7, 0.5, 0.0, 2.0, 0.2}};
  double worst = 0.0;
  run(cfg, [&](const TickLog& row) {
    worst = std::max({worst, std::abs(row.w_m.total), std::abs(row.w_s.total), row.w_m.axes.cwiseAbs().maxCoeff(),
                      row.w_s.axes.cwiseAbs().maxCoeff()});
  });
  return result("channel_zero_delay_energy", worst <= kDissipationTol, "max |W| " + sci(worst));
}

}  // namespace

Vec3 random_vector(std::mt19937_64& gen, double scale) {
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = scale * (2.0 * unit_interval(gen) - 1.0);
  return v;
}

Vec3 random_rotation_vector(std::mt19937_64& gen, double max_norm) {
  Vec3 dir;
  do {
    dir = random_vector(gen, 1.0);
  } while (dir.norm() < 1e-3 || dir.norm() > 1.0);
  return dir.normalized() * (max_norm * unit_interval(gen));
}

std::vector<Vec6> compensated_drift_trace(const Pose& g_e0, const CompGains& gains, double dt, int n) {
  DriftState ds(Pose::identity(), g_e0);
  std::vector<Vec6> out{ds.vector()};
  const Twist zero = Twist::zero();
  for (int i = 0; i < n; ++i) {
    const Twist v_ad = compensation_velocity(ds, gains, dt);
    const Twist v_sd = slave_reference_velocity(zero, v_ad, zero, ds.g_e());
    ds.update_poses(zero, v_sd, dt);
    out.push_back(ds.vector());
  }
  return out;
}

const std::vector<Suite>& self_check_suites() {
  static const std::vector<Suite> suites{
      {"hat_vee_roundtrip", hat_vee_roundtrip},
      {"exp_log_roundtrip", exp_log_roundtrip},
      {"A_inv_transpose_identity", a_inv_transpose_identity},
      {"adjoint_inverse", adjoint_inverse},
      {"geometric_decay_k_r", geometric_decay_k_r},
      {"one_step_zeroing", one_step_zeroing},
      {"exact_dissipation", exact_dissipation},
      {"channel_zero_delay_energy", channel_zero_delay_energy},
  };
  return suites;
}

std::vector<SuiteResult> run_self_checks() {
  std::vector<SuiteResult> out;
  for (const Suite& s : self_check_suites()) {
    try {
      out.push_back(s.run());
    } catch (const std::exception& e) {
      out.push_back(result(s.name, false, std::string("exception: ") + e.what()));
    }
  }
  return out;
}

}  // namespace teleop
