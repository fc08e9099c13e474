#include "teleop/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace teleop {

namespace {

std::string join(const std::string& prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

void reject_unknown(const toml::table& t, const std::string& prefix, const std::set<std::string>& allowed) {
  for (const auto& [key, node] : t) {
    if (!allowed.contains(std::string(key.str()))) throw ConfigError(join(prefix, key.str()), "unknown key");
  }
}

const toml::table* subtable(const toml::table& t, std::string_view key, const std::string& prefix) {
  const toml::node* n = t.get(key);
  if (n == nullptr) return nullptr;
  if (!n->is_table()) throw ConfigError(join(prefix, key), "expected a table");
  return n->as_table();
}

double as_number(const toml::node& n, const std::string& path) {
  if (auto v = n.value<double>()) return *v;  // ints convert as well
  throw ConfigError(path, "expected a number");
}

double get_number(const toml::table& t, std::string_view key, const std::string& prefix, double fallback) {
  const toml::node* n = t.get(key);
  return n == nullptr ? fallback : as_number(*n, join(prefix, key));
}

bool get_bool(const toml::table& t, std::string_view key, const std::string& prefix, bool fallback) {
  const toml::node* n = t.get(key);
  if (n == nullptr) return fallback;
  if (auto v = n->value<bool>(); v && n->is_boolean()) return *v;
  throw ConfigError(join(prefix, key), "expected true or false");
}

std::string get_string(const toml::table& t, std::string_view key, const std::string& prefix,
                       const std::string& fallback) {
  const toml::node* n = t.get(key);
  if (n == nullptr) return fallback;
  if (!n->is_string()) throw ConfigError(join(prefix, key), "expected a string");
  return std::string(*n->value<std::string_view>());
}

std::vector<double> number_list(const toml::node& n, const std::string& path) {
  const toml::array* arr = n.as_array();
  if (arr == nullptr) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    out.push_back(as_number(*arr->get(i), path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// Either a 6-element diagonal or a 6x6 nested array.
Mat6 get_matrix6(const toml::table& t, std::string_view key, const std::string& prefix, const Mat6& fallback) {
  const toml::node* n = t.get(key);
  if (n == nullptr) return fallback;
  const std::string path = join(prefix, key);
  const toml::array* arr = n->as_array();
  if (arr == nullptr || arr->size() != 6) throw ConfigError(path, "expected 6 numbers or a 6x6 array");
  if (arr->get(0)->is_array()) {
    Mat6 m;
    for (int r = 0; r < 6; ++r) {
      const std::vector<double> row = number_list(*arr->get(static_cast<std::size_t>(r)), path);
      if (row.size() != 6) throw ConfigError(path, "each row must have 6 numbers");
      for (int c = 0; c < 6; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
    }
    return m;
  }
  const std::vector<double> d = number_list(*n, path);
  Vec6 v;
  for (int i = 0; i < 6; ++i) v[i] = d[static_cast<std::size_t>(i)];
  return v.asDiagonal();
}

Vec3 get_gain3(const toml::table& t, std::string_view key, const std::string& prefix, const Vec3& fallback) {
  const toml::node* n = t.get(key);
  if (n == nullptr) return fallback;
  const std::string path = join(prefix, key);
  if (n->is_number()) return Vec3::Constant(as_number(*n, path));
  const std::vector<double> d = number_list(*n, path);
  if (d.size() != 3) throw ConfigError(path, "expected a number or 3 numbers");
  return Vec3(d[0], d[1], d[2]);
}

int ms_to_samples(double ms, double dt, const std::string& path) {
  if (!std::isfinite(ms) || ms < 0.0) throw ConfigError(path, "must be a non-negative number of milliseconds");
  const double samples = ms * 1e-3 / dt;
  if (std::abs(samples - std::round(samples)) > 1e-6) throw ConfigError(path, "must be a multiple of dt_s");
  return static_cast<int>(std::lround(samples));
}

int axis_index(const toml::table& t, const std::string& prefix) {
  static const std::map<std::string, int> names{{"rx", 0}, {"ry", 1}, {"rz", 2}, {"x", 3}, {"y", 4}, {"z", 5}};
  const std::string name = get_string(t, "axis", prefix, "");
  auto it = names.find(name);
  if (it == names.end()) throw ConfigError(join(prefix, "axis"), "expected one of x, y, z, rx, ry, rz");
  return it->second;
}

DeviceConfig parse_device(const toml::table& t, const std::string& prefix) {
  DeviceConfig d;
  d.lambda.base = get_matrix6(t, "inertia_kg", prefix, Mat6::Identity());
  d.lambda.amplitude = get_number(t, "inertia_modulation", prefix, 0.0);
  d.lambda.period_s = get_number(t, "inertia_modulation_period_s", prefix, 1.0);
  d.mu = get_matrix6(t, "damping_ns_m", prefix, Mat6::Zero());
  return d;
}

toml::table parse_toml(std::string_view text, std::string_view source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError("", msg.str());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, std::string_view source) {
  const toml::table root = parse_toml(text, source);
  reject_unknown(root, "", {"name", "dt_s", "duration_s", "seed", "dof", "channel", "tdpa", "compensation",
                            "master", "slave", "operator"});

  ScenarioConfig cfg;
  cfg.name = get_string(root, "name", "", cfg.name);
  cfg.dt = get_number(root, "dt_s", "", cfg.dt);
  if (!(cfg.dt > 0.0)) throw ConfigError("dt_s", "must be positive");
  cfg.duration = get_number(root, "duration_s", "", cfg.duration);
  if (const toml::node* n = root.get("seed")) {
    auto v = n->value<std::int64_t>();
    if (!v || !n->is_integer() || *v < 0) throw ConfigError("seed", "expected a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(*v);
  }
  const std::string dof = get_string(root, "dof", "", "full");
  if (dof == "full") {
    cfg.dofs = DofSet::Full;
  } else if (dof == "translational") {
    cfg.dofs = DofSet::Translational;
  } else {
    throw ConfigError("dof", "expected \"full\" or \"translational\"");
  }

  if (const toml::table* ch = subtable(root, "channel", "")) {
    const std::string p = "channel";
    reject_unknown(*ch, p, {"delay_forward_ms", "delay_backward_ms", "jitter", "jitter_amplitude_ms",
                            "jitter_period_ms", "loss_probability"});
    const std::string jitter = get_string(*ch, "jitter", p, "constant");
    DelayKind kind = DelayKind::Constant;
    if (jitter == "sinusoidal") {
      kind = DelayKind::SinusoidalJitter;
    } else if (jitter == "random_walk") {
      kind = DelayKind::SeededRandomWalk;
    } else if (jitter != "constant") {
      throw ConfigError(p + ".jitter", "expected constant, sinusoidal or random_walk");
    }
    const int amp = ms_to_samples(get_number(*ch, "jitter_amplitude_ms", p, 0.0), cfg.dt, p + ".jitter_amplitude_ms");
    const int period = ms_to_samples(get_number(*ch, "jitter_period_ms", p, cfg.dt * 1e3 * 1000.0), cfg.dt,
                                     p + ".jitter_period_ms");
    cfg.forward = DelayProfile{kind, ms_to_samples(get_number(*ch, "delay_forward_ms", p, 0.0), cfg.dt,
                                                   p + ".delay_forward_ms"),
                               amp, period, 0};
    cfg.backward = DelayProfile{kind, ms_to_samples(get_number(*ch, "delay_backward_ms", p, 0.0), cfg.dt,
                                                    p + ".delay_backward_ms"),
                                amp, period, 0};
    cfg.loss_probability = get_number(*ch, "loss_probability", p, 0.0);
  }

  if (const toml::table* td = subtable(root, "tdpa", "")) {
    const std::string p = "tdpa";
    reject_unknown(*td, p, {"mode", "admittance_pc", "impedance_pc"});
    const std::string mode = get_string(*td, "mode", p, "concatenated");
    if (mode == "concatenated") {
      cfg.mode = PcMode::Concatenated;
    } else if (mode == "coupled") {
      cfg.mode = PcMode::Coupled;
    } else {
      throw ConfigError(p + ".mode", "expected concatenated or coupled");
    }
    cfg.admittance_pc = get_bool(*td, "admittance_pc", p, true);
    cfg.impedance_pc = get_bool(*td, "impedance_pc", p, true);
  }

  if (const toml::table* c = subtable(root, "compensation", "")) {
    const std::string p = "compensation";
    reject_unknown(*c, p, {"enabled", "k_r", "k_t", "allow_divergent"});
    cfg.compensation = get_bool(*c, "enabled", p, false);
    cfg.k_r = get_number(*c, "k_r", p, cfg.k_r);
    cfg.k_t = get_gain3(*c, "k_t", p, cfg.k_t);
    cfg.allow_divergent_gains = get_bool(*c, "allow_divergent", p, false);
  }

  if (const toml::table* m = subtable(root, "master", "")) {
    reject_unknown(*m, "master", {"inertia_kg", "inertia_modulation", "inertia_modulation_period_s", "damping_ns_m"});
    cfg.master = parse_device(*m, "master");
  }

  if (const toml::table* s = subtable(root, "slave", "")) {
    reject_unknown(*s, "slave", {"inertia_kg", "inertia_modulation", "inertia_modulation_period_s", "damping_ns_m",
                                 "kp_n_m", "kd_ns_m"});
    cfg.slave = parse_device(*s, "slave");
    cfg.slave_gains.k_p = get_matrix6(*s, "kp_n_m", "slave", cfg.slave_gains.k_p);
    cfg.slave_gains.k_d = get_matrix6(*s, "kd_ns_m", "slave", cfg.slave_gains.k_d);
  }

  if (const toml::table* op = subtable(root, "operator", "")) {
    const std::string p = "operator";
    reject_unknown(*op, p, {"stiffness_n_m", "damping_ns_m", "waypoints", "sine"});
    cfg.hand_stiffness = get_matrix6(*op, "stiffness_n_m", p, cfg.hand_stiffness);
    cfg.hand_damping = get_matrix6(*op, "damping_ns_m", p, cfg.hand_damping);
    if (const toml::node* wn = op->get("waypoints")) {
      const toml::array* arr = wn->as_array();
      if (arr == nullptr) throw ConfigError(p + ".waypoints", "expected an array of [t_s, x, y, z, rx, ry, rz]");
      for (std::size_t i = 0; i < arr->size(); ++i) {
        const std::string wp = p + ".waypoints[" + std::to_string(i) + "]";
        const std::vector<double> w = number_list(*arr->get(i), wp);
        if (w.size() != 4 && w.size() != 7) throw ConfigError(wp, "expected [t_s, x, y, z] or [t_s, x, y, z, rx, ry, rz]");
        Waypoint pt;
        pt.t = w[0];
        pt.position = Vec3(w[1], w[2], w[3]);
        if (w.size() == 7) pt.rotation = Vec3(w[4], w[5], w[6]);
        cfg.trajectory.waypoints.push_back(pt);
      }
    }
    if (const toml::node* sn = op->get("sine")) {
      const toml::array* arr = sn->as_array();
      if (arr == nullptr) throw ConfigError(p + ".sine", "expected an array of tables ([[operator.sine]])");
      for (std::size_t i = 0; i < arr->size(); ++i) {
        const std::string sp = p + ".sine[" + std::to_string(i) + "]";
        const toml::table* st = arr->get(i)->as_table();
        if (st == nullptr) throw ConfigError(sp, "expected a table");
        reject_unknown(*st, sp, {"axis", "amplitude_si", "frequency_hz", "phase_rad", "start_s", "end_s", "ramp_s"});
        SineComponent c;
        c.axis = axis_index(*st, sp);
        c.amplitude = get_number(*st, "amplitude_si", sp, 0.0);
        c.frequency_hz = get_number(*st, "frequency_hz", sp, 0.0);
        c.phase_rad = get_number(*st, "phase_rad", sp, 0.0);
        c.start_s = get_number(*st, "start_s", sp, 0.0);
        c.end_s = get_number(*st, "end_s", sp, cfg.duration);
        c.ramp_s = get_number(*st, "ramp_s", sp, 0.0);
        cfg.trajectory.sines.push_back(c);
      }
    }
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.string());
}

std::vector<CompGains> parse_gains(std::string_view text, std::string_view source) {
  const toml::table root = parse_toml(text, source);
  reject_unknown(root, "", {"gains"});
  const toml::node* n = root.get("gains");
  const toml::array* arr = n == nullptr ? nullptr : n->as_array();
  if (arr == nullptr || arr->empty()) throw ConfigError("gains", "at least one [[gains]] entry is required");
  std::vector<CompGains> out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    const std::string p = "gains[" + std::to_string(i) + "]";
    const toml::table* t = arr->get(i)->as_table();
    if (t == nullptr) throw ConfigError(p, "expected a table");
    reject_unknown(*t, p, {"k_r", "k_t", "allow_divergent"});
    if (t->get("k_r") == nullptr) throw ConfigError(p + ".k_r", "missing");
    if (t->get("k_t") == nullptr) throw ConfigError(p + ".k_t", "missing");
    const double k_r = get_number(*t, "k_r", p, 1.0);
    const Vec3 k_t = get_gain3(*t, "k_t", p, Vec3::Ones());
    try {
      out.emplace_back(k_r, k_t, get_bool(*t, "allow_divergent", p, false));
    } catch (const OutOfDomain& e) {
      throw ConfigError(p, e.what());
    }
  }
  return out;
}

std::vector<CompGains> load_gains(const std::filesystem::path& path) {
  return parse_gains(read_file(path), path.string());
}

}  // namespace teleop
