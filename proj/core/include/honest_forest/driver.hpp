#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "honest_forest/splitters.hpp"

namespace honest_forest {

inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes shared by every command: 0 success, 2 usage or configuration
// error, 3 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Runs the experiment described by the JSON config and writes results.csv,
// summary.json, manifest.json and config.canonical.json into out_dir.
int cmd_simulate(const std::string& config_path, const std::string& out_dir, unsigned threads,
                 std::ostream& out, std::ostream& err);

struct MomentsOptions {
  std::string scheme;  // multinomial | without-replacement | wild-poisson | wild-lognormal
  std::optional<long> m;
  std::size_t n = 100;
  std::size_t reps = 0;  // 0 = analytic only
  std::uint64_t seed = 1;
  double sigma = 0.5;  // wild-lognormal
};

int cmd_moments(const MomentsOptions& options, std::ostream& out, std::ostream& err);

struct RecursionOptions {
  double p = 0.5;
  long depth = 1;
};

int cmd_recursion(const RecursionOptions& options, std::ostream& out, std::ostream& err);

struct ProbeOptions {
  std::string schedule;   // e.g. poly:0.6, sqrtlog:2.0, logdepth:0.1, log2power:0.667, subsample:0.6
  std::size_t d = 1;
  std::size_t n_max = 1000000;
  std::string mode = "weak";  // weak | strong-sum | bootstrap-sum
  std::string subsample;      // bootstrap-sum only, schedule spec for m_n
};

int cmd_probe(const ProbeOptions& options, std::ostream& out, std::ostream& err);

// Parses "name:param" schedule specs used on the command line.
Schedule parse_schedule_spec(const std::string& spec);

}  // namespace honest_forest
