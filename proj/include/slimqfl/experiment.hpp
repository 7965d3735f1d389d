#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "slimqfl/experiment_config.hpp"
#include "slimqfl/metrics.hpp"

namespace slimqfl {

/// One cell of the sweep grid over (sigma, N, L, B).
struct SweepPoint {
  double sigma_db = -40.0;
  int devices = 10;
  int local_iters = 10;
  int batch = 32;
};

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg);

/// "m40dB" for -40 dB, "25.5dB" for 25.5 dB.
std::string sigma_tag(double sigma_db);

/// Dataset selected by the config: synthetic digits when requested, otherwise
/// the MNIST training files under data_dir.
MiniDataset load_dataset(const ExperimentConfig& cfg);

/// Channel thresholds in effect: explicit values, or the calibrated default.
Thresholds resolve_thresholds(const ExperimentConfig& cfg);

SimulationConfig simulation_config(const ExperimentConfig& cfg,
                                   const SweepPoint& point, Scheme scheme,
                                   std::uint64_t seed);

/// Rows for every (scheme, seed) at one sweep point, ordered by scheme (config
/// order), then seed, then epoch.
std::vector<MetricsRow> run_sweep_point(const ExperimentConfig& cfg,
                                        const MiniDataset& data,
                                        const SweepPoint& point,
                                        std::ostream* log = nullptr);

struct ExperimentOutputs {
  std::vector<std::filesystem::path> csv_files;
  std::vector<std::filesystem::path> svg_files;
};

/// Runs the whole grid. Writes resolved_config.txt, one metrics CSV per sweep
/// point, a learning-curve SVG per sweep point, and a final-accuracy SVG for
/// every axis swept over more than one value.
ExperimentOutputs run_experiment(const ExperimentConfig& cfg,
                                 std::ostream* log = nullptr);

}  // namespace slimqfl
