#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slimqfl/federation.hpp"

namespace slimqfl {

/// Fully resolved experiment settings. List-valued fields are sweep axes; the
/// runner takes their cartesian product.
struct ExperimentConfig {
  std::vector<Scheme> schemes{std::begin(kAllSchemes), std::end(kAllSchemes)};
  std::vector<double> sigma_db{-40.0};
  std::vector<int> devices{10};
  std::vector<int> local_iters{10};
  std::vector<int> batch{32};
  int epochs = 200;
  double lr = 0.01;
  double decay = 0.001;
  LrSchedule lr_schedule = LrSchedule::kInverseTime;
  double w = 1.6;
  int layers = 3;
  std::optional<double> u_pole;  // bits/s/Hz; calibrated when unset
  std::optional<double> u_whole;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  int per_device = 64;
  int test_size = 512;
  int classical_params = 64;  // 64, or 56 with two input pixels dropped
  std::filesystem::path data_dir = "data/mnist";
  std::filesystem::path out_dir = "results";
  bool synthetic_data = false;
  int synthetic_count = 6000;
  std::uint64_t data_seed = 2024;
  int threads = 1;

  void validate() const;
};

/// Parses command-line arguments (without the program name). `--config FILE`
/// reads flat `key = value` lines whose keys are the flag names; flags given on
/// the command line take precedence. Throws std::invalid_argument on unknown
/// keys or out-of-range values. Returns std::nullopt after printing help.
std::optional<ExperimentConfig> load_config(std::span<const std::string> args);

/// The resolved config in the same `key = value` format load_config reads.
std::string to_config_text(const ExperimentConfig& cfg);

}  // namespace slimqfl
