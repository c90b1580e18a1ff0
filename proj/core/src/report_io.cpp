#include "honest_forest/report_io.hpp"

#include <cstdio>

#include "json.hpp"

namespace honest_forest {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string report_to_csv(const ConvergenceReport& report) {
  std::string out = "mode,n,query_id";
  for (std::size_t j = 0; j < report.dimension; ++j) out += ",x" + std::to_string(j);
  out += ",metric,value,std_err,empty_rate,replication_count\n";

  for (const ReportRow& row : report.rows) {
    out += report.mode;
    out += ',' + std::to_string(row.n);
    out += ',' + std::to_string(row.query_id);
    for (std::size_t j = 0; j < report.dimension; ++j) {
      out += ',';
      if (j < row.x.size()) out += format_double(row.x[j]);
    }
    out += ',' + row.metric;
    out += ',' + format_double(row.value);
    out += ',' + format_double(row.std_err);
    out += ',' + format_double(row.empty_rate);
    out += ',' + std::to_string(row.replications);
    out += '\n';
  }
  return out;
}

std::string report_to_summary_json(const ConvergenceReport& report) {
  json doc = json::object();
  for (const ReportRow& row : report.rows) {
    const std::string key =
        report.mode + "|" + std::to_string(row.n) + "|" + std::to_string(row.query_id);
    json entry{{"value", row.value},
               {"std_err", row.std_err},
               {"empty_rate", row.empty_rate},
               {"replications", row.replications}};
    if (!row.x.empty()) entry["x"] = row.x;
    doc[key][row.metric] = std::move(entry);
  }
  return doc.dump();
}

std::string canonical_json_text(const std::string& raw) {
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return doc.dump();
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string moment_report_to_json(const MomentReport& report) {
  return json{{"mean_w1", report.mean_w1},
              {"second_w1", report.second_w1},
              {"cross_w1w2", report.cross_w1w2},
              {"l21_ratio", report.l21_ratio},
              {"correlation_ratio", report.correlation_ratio},
              {"adjusted_mixed", report.adjusted_mixed},
              {"central4", report.central4},
              {"central2", report.central2}}
      .dump();
}

std::string probe_series_to_csv(const ProbeSeries& series) {
  std::string out = "n,log_term,value\n";
  for (const ProbePoint& point : series.points) {
    out += std::to_string(point.n);
    out += ',' + format_double(point.log_term);
    out += ',' + format_double(point.value);
    out += '\n';
  }
  return out;
}

std::string audit_to_csv(const RegularityAudit& audit) {
  std::vector<bool> depth_bad(audit.leaf_count, false);
  std::vector<bool> balance_bad(audit.leaf_count, false);
  std::vector<bool> window_bad(audit.leaf_count, false);
  for (std::size_t leaf : audit.depth_violations) depth_bad[leaf] = true;
  for (std::size_t leaf : audit.balance_violations) balance_bad[leaf] = true;
  for (std::size_t leaf : audit.node_size_violations) window_bad[leaf] = true;

  std::string out = "leaf,i_count,depth,in_window,depth_ok,balance_ok\n";
  for (std::size_t leaf = 0; leaf < audit.leaf_count; ++leaf) {
    out += std::to_string(leaf);
    out += ',' + std::to_string(audit.leaf_i_counts[leaf]);
    out += ',' + std::to_string(audit.leaf_depths[leaf]);
    out += window_bad[leaf] ? ",0" : ",1";
    out += depth_bad[leaf] ? ",0" : ",1";
    out += balance_bad[leaf] ? ",0" : ",1";
    out += '\n';
  }
  return out;
}

}  // namespace honest_forest
