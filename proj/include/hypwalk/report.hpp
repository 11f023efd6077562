#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace hypwalk {

// Declarative experiment configuration; one file maps 1:1 onto operation
// parameters, defaults are echoed into every report for provenance.
struct RunConfig {
  std::string experiment;
  int rank = 2;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 1;
  // empty = uniform walk on the 2k generators
  std::vector<std::pair<std::string, std::string>> measure_weights;
  nlohmann::json params = nlohmann::json::object();

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct ExperimentOutput {
  std::string csv_path;
  std::string summary_path;
};

// Runs one experiment and writes <out>/<experiment>.csv plus a JSON summary.
// Outputs are a pure function of the config (byte-identical reruns).
ExperimentOutput run_experiment(const RunConfig& config);

const std::vector<std::string>& experiment_names();

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// The acceptance suite; prints one pass/fail line per criterion to `progress`
// when given.
std::vector<CriterionResult> run_acceptance(std::ostream* progress = nullptr);

}  // namespace hypwalk
