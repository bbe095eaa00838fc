#include "molcap/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace molcap {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

void write_csv(const SweepTable& table, std::ostream& out) {
  if (table.rows.empty()) {
    throw std::invalid_argument("write_csv: no records");
  }
  out << "parameter";
  if (table.has_ls) out << ",capacity_ls_nats";
  if (table.has_ts) {
    if (table.ts_types.empty()) {
      out << ",capacity_ts_nats";
    } else {
      for (int m : table.ts_types) out << ",capacity_ts_m" << m << "_nats";
    }
  }
  if (table.has_upper) out << ",upper_bound_nats";
  if (table.has_lower) out << ",lower_bound_nats";
  if (table.has_blocking) out << ",blocking_capacity_nats";
  out << ",converged,gap_nats\n";

  const double nan = std::nan("");
  for (const SweepRecord& row : table.rows) {
    out << format_number(row.parameter);
    if (table.has_ls) out << ',' << format_number(row.ls.value_or(nan));
    if (table.has_ts) {
      const std::size_t count =
          table.ts_types.empty() ? 1 : table.ts_types.size();
      for (std::size_t i = 0; i < count; ++i) {
        out << ','
            << format_number(i < row.ts.size() ? row.ts[i].second : nan);
      }
    }
    if (table.has_upper) out << ',' << format_number(row.upper.value_or(nan));
    if (table.has_lower) out << ',' << format_number(row.lower.value_or(nan));
    if (table.has_blocking) {
      out << ',' << format_number(row.blocking.value_or(nan));
    }
    out << ',' << (row.converged ? 1 : 0) << ',' << format_number(row.gap)
        << '\n';
  }
}

void write_csv(const SweepTable& table, const std::string& path) {
  if (table.rows.empty()) {
    throw std::invalid_argument("write_csv: no records");
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw std::runtime_error("write_csv: cannot open " + path);
  }
  write_csv(table, file);
  file.flush();
  if (!file) {
    throw std::runtime_error("write_csv: failed writing " + path);
  }
}

}  // namespace molcap
