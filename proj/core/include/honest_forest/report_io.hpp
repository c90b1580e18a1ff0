#pragma once

#include <string>

#include "honest_forest/bootstrap.hpp"
#include "honest_forest/diagnostics.hpp"
#include "honest_forest/experiments.hpp"

namespace honest_forest {

// Doubles print with 17 significant digits so that byte identity of the
// emitted files coincides with value identity.
std::string format_double(double value);

// Long-form CSV with the fixed column set
//   mode,n,query_id,x0..x{d-1},metric,value,std_err,empty_rate,replication_count
// Rows without a query point leave the x columns blank; cross-n rows
// (trend verdicts, path summaries) carry n = 0.
std::string report_to_csv(const ConvergenceReport& report);

// JSON mirror of the CSV keyed "mode|n|query_id" -> metric -> fields.
std::string report_to_summary_json(const ConvergenceReport& report);

// Canonical form of a JSON document: sorted keys, no insignificant
// whitespace. Throws ConfigError("config", ...) on malformed input.
std::string canonical_json_text(const std::string& raw);

// FNV-1a 64-bit hex digest.
std::string fnv1a64_hex(const std::string& bytes);

std::string moment_report_to_json(const MomentReport& report);
std::string probe_series_to_csv(const ProbeSeries& series);

// Per-leaf audit rows: leaf,i_count,depth,in_window,depth_ok,balance_ok.
std::string audit_to_csv(const RegularityAudit& audit);

}  // namespace honest_forest
