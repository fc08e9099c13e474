#include "teleop/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace teleop {

namespace {

const char* const kAxes[6] = {"wx", "wy", "wz", "vx", "vy", "vz"};
const char* const kPoseAxes[6] = {"x", "y", "z", "roll", "pitch", "yaw"};

void add6(std::vector<std::string>& cols, const std::string& prefix, const char* const (&axes)[6]) {
  for (const char* a : axes) cols.push_back(prefix + "_" + a);
}

class Row {
 public:
  explicit Row(std::ostream& os) : os_(os) {}
  ~Row() { os_ << '\n'; }

  Row& num(double v) { return text(format_double(v)); }
  Row& integer(long long v) { return text(std::to_string(v)); }
  Row& flag(bool b) { return text(b ? "1" : "0"); }
  Row& vec(const Vec6& v) {
    for (int i = 0; i < 6; ++i) num(v[i]);
    return *this;
  }
  Row& vec3(const Vec3& v) {
    for (int i = 0; i < 3; ++i) num(v[i]);
    return *this;
  }
  Row& pose(const Pose& g) {
    vec3(g.p);
    return vec3(rpy(g.r));
  }
  Row& text(const std::string& s) {
    if (!first_) os_ << ',';
    first_ = false;
    os_ << s;
    return *this;
  }

 private:
  std::ostream& os_;
  bool first_ = true;
};

void write_header(std::ostream& os, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

const std::vector<std::string>& log_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"tick", "t_s"};
    add6(c, "cmd", kPoseAxes);
    add6(c, "master", kPoseAxes);
    add6(c, "slave", kPoseAxes);
    for (const char* v : {"v_m", "v_s", "v_tilde", "v_ad", "v_pc", "v_sd", "f_s", "f_chan", "f_hat", "f_m"}) {
      add6(c, v, kAxes);
    }
    add6(c, "w_m", kAxes);
    c.push_back("w_m_total");
    add6(c, "w_s", kAxes);
    c.push_back("w_s_total");
    for (const char* s : {"diss_m_total", "diss_s_total", "pc_m_active", "pc_s_active", "e_in_m_total",
                          "e_out_m_total", "e_in_s_total", "e_out_s_total", "e_pc_m_total", "e_pc_s_total",
                          "phi_e_x", "phi_e_y", "phi_e_z", "p_e_x", "p_e_y", "p_e_z", "rot_log_valid"}) {
      c.push_back(s);
    }
    return c;
  }();
  return cols;
}

void write_log_header(std::ostream& os) { write_header(os, log_columns()); }

void write_log_row(std::ostream& os, const TickLog& r) {
  Row row(os);
  row.integer(r.tick).num(r.t);
  row.pose(r.command).pose(r.master).pose(r.slave);
  row.vec(r.v_m.vector()).vec(r.v_s.vector()).vec(r.v_tilde).vec(r.v_ad).vec(r.v_pc).vec(r.v_sd);
  row.vec(r.f_s).vec(r.f_chan).vec(r.f_hat).vec(r.f_m);
  row.vec(r.w_m.axes).num(r.w_m.total).vec(r.w_s.axes).num(r.w_s.total);
  row.num(r.diss_m_total).num(r.diss_s_total).flag(r.pc_m_active).flag(r.pc_s_active);
  row.num(r.ledger_m.in_total).num(r.ledger_m.out_total).num(r.ledger_s.in_total).num(r.ledger_s.out_total);
  row.num(r.e_pc_m_total).num(r.e_pc_s_total);
  row.vec3(r.phi_e).vec3(r.p_e).flag(r.rot_log_valid);
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c{"ticks", "terminal_drift_m", "terminal_drift_rad"};
    add6(c, "terminal_drift", kAxes);
    c.push_back("peak_drift_m");
    c.push_back("peak_drift_rad");
    add6(c, "peak_drift", kAxes);
    add6(c, "peak_excursion", kAxes);
    for (const char* s : {"min_post_pc_energy", "max_force_norm", "max_torque_norm", "position_rms_error",
                          "gap_count"}) {
      c.push_back(s);
    }
    add6(c, "gap_count", kAxes);
    for (const char* s : {"pc_slave_ticks", "pc_master_ticks", "steps_to_zero"}) c.push_back(s);
    return c;
  }();
  return cols;
}

std::vector<std::string> metrics_fields(const Metrics& m) {
  std::vector<std::string> f;
  auto num = [&f](double v) { f.push_back(format_double(v)); };
  auto vec = [&num](const Vec6& v) {
    for (int i = 0; i < 6; ++i) num(v[i]);
  };
  f.push_back(std::to_string(m.ticks));
  num(m.terminal_drift_m);
  num(m.terminal_drift_rad);
  vec(m.terminal_drift_axes);
  num(m.peak_drift_m);
  num(m.peak_drift_rad);
  vec(m.peak_drift_axes);
  vec(m.peak_excursion_axes);
  num(m.min_post_pc_energy);
  num(m.max_force_norm);
  num(m.max_torque_norm);
  num(m.position_rms_error);
  f.push_back(std::to_string(m.gap_count));
  for (std::int64_t g : m.gap_count_axes) f.push_back(std::to_string(g));
  f.push_back(std::to_string(m.pc_slave_ticks));
  f.push_back(std::to_string(m.pc_master_ticks));
  f.push_back(std::to_string(m.steps_to_zero));
  return f;
}

void write_metrics(std::ostream& os, const Metrics& m) {
  write_header(os, metrics_columns());
  write_header(os, metrics_fields(m));
}

void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows) {
  std::vector<std::string> cols{"k_r", "k_t_x", "k_t_y", "k_t_z"};
  cols.insert(cols.end(), metrics_columns().begin(), metrics_columns().end());
  write_header(os, cols);
  for (const SweepRow& r : rows) {
    std::vector<std::string> f{format_double(r.gains.k_r())};
    for (int i = 0; i < 3; ++i) f.push_back(format_double(r.gains.k_t()(i, i)));
    const std::vector<std::string> m = metrics_fields(r.metrics);
    f.insert(f.end(), m.begin(), m.end());
    write_header(os, f);
  }
}

void write_summary(std::ostream& os, const ScenarioConfig& cfg, const Metrics& m) {
  os << "scenario: " << cfg.name << '\n'
     << "mode: " << (cfg.mode == PcMode::Coupled ? "coupled" : "concatenated") << '\n'
     << "dof: " << (cfg.dofs == DofSet::Full ? "full" : "translational") << '\n'
     << "compensation: " << (cfg.compensation ? "on" : "off") << '\n'
     << "seed: " << cfg.seed << '\n';
  const std::vector<std::string>& cols = metrics_columns();
  const std::vector<std::string> vals = metrics_fields(m);
  for (std::size_t i = 0; i < cols.size(); ++i) os << cols[i] << ": " << vals[i] << '\n';
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("no column " + std::string(name));
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (std::getline(is, line)) t.header = split(line);
  while (std::getline(is, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

}  // namespace teleop
