#pragma once

#include <ostream>
#include <string>

#include "molcap/scenarios.hpp"

namespace molcap {

// 9 significant digits; infinities become the literal "inf"/"-inf", NaN "nan".
std::string format_number(double value);

// Header plus one row per record. Output is byte-identical across runs with
// identical inputs. Throws std::invalid_argument for an empty table and
// std::runtime_error when the path cannot be written (no file is created for
// an empty table).
void write_csv(const SweepTable& table, std::ostream& out);
void write_csv(const SweepTable& table, const std::string& path);

}  // namespace molcap
