#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aspecteval/matching.hpp"

namespace aspecteval {

inline constexpr const char* kToolName = "aspecteval";
inline constexpr const char* kToolVersion = "0.1.0";

// Everything a command run depends on; serialized into every report so runs
// can be reproduced from the report alone.
struct RunConfig {
  double theta = 0.95;
  std::string backend = "exact";  // exact | char-ngram | embedding[:MODEL] | oracle:FILE
  std::string provider_url;
  std::string cache_path;
  uint64_t seed = 1907;  // fixed default so runs without --seed are reproducible
  long iterations = 100000;
  std::string grid = "0.025:1:0.025";
  int jobs = 1;
  std::string format = "canonical";
  std::string out = "report";
  std::string conflicting = "neutral";  // neutral | keep
  std::string bins = "none";            // none | quartiles | comma-separated edges
};

// Grid spec: either "begin:end:step" or a comma-separated list of values.
// Values must be strictly increasing within (0, 1].
std::vector<Theta> parse_grid(const std::string& spec);

// Command entry points shared by the CLI binary and the test suites.
// Exit codes: 0 success, 2 input or validation error, 3 provider failure.
int run_evaluate(const RunConfig& config, const std::string& gold_path,
                 const std::string& predictions_path);
int run_compare(const RunConfig& config, const std::string& gold_path,
                const std::string& predictions_a, const std::string& predictions_b);
int run_sweep(const RunConfig& config, const std::string& gold_path,
              const std::vector<std::string>& prediction_paths);
int run_kappa(const RunConfig& config, const std::string& ratings_path);
int run_convert(const RunConfig& config, const std::string& source_path,
                const std::string& dest_path);

}  // namespace aspecteval
