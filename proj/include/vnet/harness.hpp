#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vnet/config.hpp"

namespace vnet {

struct TrainResult {
  std::filesystem::path metrics_csv;
  std::filesystem::path checkpoint_json;
};

// Trains per the config and writes metrics.csv, timing.csv, periodic
// checkpoints, and checkpoint_final.json under cfg.out_dir.
TrainResult run_train(const ExperimentConfig& cfg);

struct EvalOptions {
  std::filesystem::path checkpoint;
  int episodes = 500;
  std::vector<double> omegas;  // preference sweep (envelope checkpoints only)
  std::filesystem::path out_dir;  // empty: <cfg.out_dir>/eval
  std::optional<std::uint64_t> seed;
};

struct EvalResult {
  std::filesystem::path metrics_csv;
  std::filesystem::path summary_json;
  std::filesystem::path returns_csv;
};

// Greedy evaluation of a checkpoint; one summary row (and returns.csv row) per
// preference for envelope checkpoints.
EvalResult run_eval(const ExperimentConfig& cfg, const EvalOptions& opts);

struct ParetoOptions {
  std::vector<std::filesystem::path> inputs;  // returns CSVs
  std::filesystem::path out_dir = ".";
  std::array<double, 2> reference{0.0, 0.0};
};

struct ParetoResult {
  std::filesystem::path front_csv;
  std::filesystem::path ccs_csv;
  std::filesystem::path report_json;
};

// Merges return points, filters the front and CCS, and reports per-label
// hypervolume ordered best-first.
ParetoResult run_pareto(const ParetoOptions& opts);

// Built-in oracle suites (channel pins, gradient checks, CCS brute force,
// envelope reduction). Returns the number of failed suites.
int run_check(const std::string& suite);

}  // namespace vnet
