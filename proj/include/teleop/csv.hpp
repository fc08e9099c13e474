#pragma once

// CSV output for tick logs, metrics and sweeps. Numbers are written with 17
// significant digits through std::to_chars, so the text is independent of
// the global locale and parses back to the identical double.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "teleop/simrunner.hpp"

namespace teleop {

std::string format_double(double v);
// Throws std::invalid_argument unless the whole field is a number.
double parse_double(std::string_view s);

const std::vector<std::string>& log_columns();
void write_log_header(std::ostream& os);
void write_log_row(std::ostream& os, const TickLog& row);

const std::vector<std::string>& metrics_columns();
std::vector<std::string> metrics_fields(const Metrics& m);
void write_metrics(std::ostream& os, const Metrics& m);

// Gain columns k_r, k_t_x, k_t_y, k_t_z followed by the metrics columns.
void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows);

// Plain-text key/value report.
void write_summary(std::ostream& os, const ScenarioConfig& cfg, const Metrics& m);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& is);

}  // namespace teleop
