#pragma once

// Bit-exact result serialization: CSV traces with shortest round-trip
// decimals, JSON reports mirroring RunReport, and parsing for both.

#include <string>
#include <vector>

#include "ecco/solver.hpp"

namespace ecco {

/// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Header row: iter,t,dt,f,grad_norm,max_lte,charge_sq,grow_iters,shrink_iters
std::string trace_to_csv(const std::vector<IterationRecord>& trace);
std::vector<IterationRecord> trace_from_csv(const std::string& csv);

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& json_text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ecco
