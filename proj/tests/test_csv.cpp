#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "molcap/csv.hpp"

using namespace molcap;

namespace {

SweepTable small_table() {
  SweepTable table;
  table.parameter_name = "As";
  table.ts_types = {2, 4};
  table.has_ls = true;
  table.has_ts = true;
  table.has_upper = true;
  SweepRecord row;
  row.parameter = 80.0;
  row.ls = 1.23456789123;
  row.ts = {{2, 1.5}, {4, 1.25}};
  row.upper = std::numeric_limits<double>::infinity();
  row.converged = true;
  row.gap = 9.87654321e-8;
  table.rows.push_back(row);
  return table;
}

}  // namespace

TEST_CASE("number formatting uses 9 significant digits and literals") {
  CHECK(format_number(1.23456789123) == "1.23456789");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(9.87654321e-8) == "9.87654321e-08");
}

TEST_CASE("csv layout matches the sweep columns") {
  std::ostringstream out;
  write_csv(small_table(), out);
  CHECK(out.str() ==
        "parameter,capacity_ls_nats,capacity_ts_m2_nats,capacity_ts_m4_nats,"
        "upper_bound_nats,converged,gap_nats\n"
        "80,1.23456789,1.5,1.25,inf,1,9.87654321e-08\n");
}

TEST_CASE("csv output is deterministic") {
  std::ostringstream a, b;
  write_csv(small_table(), a);
  write_csv(small_table(), b);
  CHECK(a.str() == b.str());
}

TEST_CASE("empty tables are rejected before any file is created") {
  SweepTable empty;
  std::ostringstream out;
  CHECK_THROWS_AS(write_csv(empty, out), std::invalid_argument);
  CHECK_THROWS_AS(write_csv(empty, std::string("/tmp/molcap_empty.csv")),
                  std::invalid_argument);
  CHECK_THROWS_AS(write_csv(small_table(),
                            std::string("/nonexistent-dir/out.csv")),
                  std::runtime_error);
}
