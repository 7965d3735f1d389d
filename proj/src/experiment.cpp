#include "slimqfl/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "slimqfl/parallel.hpp"
#include "slimqfl/svg_plot.hpp"
#include "slimqfl/synthetic_digits.hpp"

namespace slimqfl {
namespace {

std::string point_tag(const SweepPoint& p) {
  return "N" + std::to_string(p.devices) + "_L" + std::to_string(p.local_iters) +
         "_B" + std::to_string(p.batch);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

// Mean accuracy per (scheme, epoch) over seeds.
std::map<std::string, std::map<int, double>> mean_curves(
    const std::vector<MetricsRow>& rows) {
  std::map<std::string, std::map<int, std::pair<double, int>>> acc;
  for (const auto& r : rows) {
    auto& cell = acc[r.scheme][r.epoch];
    cell.first += r.accuracy;
    cell.second += 1;
  }
  std::map<std::string, std::map<int, double>> out;
  for (const auto& [scheme, epochs] : acc) {
    for (const auto& [epoch, sum] : epochs) {
      out[scheme][epoch] = sum.first / sum.second;
    }
  }
  return out;
}

std::string sweep_axis_name(int axis) {
  switch (axis) {
    case 0: return "devices";
    case 1: return "local_iters";
    default: return "batch";
  }
}

}  // namespace

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  for (double s : cfg.sigma_db) {
    for (int n : cfg.devices) {
      for (int l : cfg.local_iters) {
        for (int b : cfg.batch) points.push_back(SweepPoint{s, n, l, b});
      }
    }
  }
  return points;
}

std::string sigma_tag(double sigma_db) {
  const std::string mag = format_double(std::abs(sigma_db));
  return (sigma_db < 0 ? "m" : "") + mag + "dB";
}

MiniDataset load_dataset(const ExperimentConfig& cfg) {
  if (cfg.synthetic_data) {
    return build_mini_dataset(
        make_synthetic_digits(static_cast<std::size_t>(cfg.synthetic_count),
                              cfg.data_seed));
  }
  const MnistFiles files;
  if (!std::filesystem::exists(cfg.data_dir / files.images) ||
      !std::filesystem::exists(cfg.data_dir / files.labels)) {
    throw std::runtime_error("MNIST files not found under " +
                             cfg.data_dir.string() +
                             " (pass --synthetic-data for the built-in set)");
  }
  return build_mini_dataset(load_mnist(cfg.data_dir, files));
}

Thresholds resolve_thresholds(const ExperimentConfig& cfg) {
  if (cfg.u_pole && cfg.u_whole) return Thresholds{*cfg.u_pole, *cfg.u_whole};
  QsnnConfig q;
  q.n_layers = cfg.layers;
  const auto pole = static_cast<int>(q.pole_count());
  return calibrate_thresholds(pole, pole + static_cast<int>(q.angle_count()));
}

SimulationConfig simulation_config(const ExperimentConfig& cfg,
                                   const SweepPoint& point, Scheme scheme,
                                   std::uint64_t seed) {
  SimulationConfig sim;
  sim.scheme = scheme;
  sim.local_iters = point.local_iters;
  sim.batch = point.batch;
  sim.epochs = cfg.epochs;
  sim.eta0 = cfg.lr;
  sim.decay = cfg.decay;
  sim.schedule = cfg.lr_schedule;
  sim.qsnn.n_layers = cfg.layers;
  sim.qsnn.observable_scale = cfg.w;
  const Thresholds th = resolve_thresholds(cfg);
  sim.channel = ChannelConfig{db_to_linear(point.sigma_db), th.u_pole, th.u_whole};
  sim.seed = seed;
  sim.classical_56 = cfg.classical_params == 56;
  return sim;
}

std::vector<MetricsRow> run_sweep_point(const ExperimentConfig& cfg,
                                        const MiniDataset& data,
                                        const SweepPoint& point,
                                        std::ostream* log) {
  const std::size_t n_seeds = cfg.seeds.size();
  const std::size_t cells = cfg.schemes.size() * n_seeds;
  std::vector<std::vector<MetricsRow>> per_cell(cells);
  std::mutex log_mutex;

  parallel_for(cells, cfg.threads, [&](std::size_t c) {
    const Scheme scheme = cfg.schemes[c / n_seeds];
    const std::uint64_t seed = cfg.seeds[c % n_seeds];
    const auto start = std::chrono::steady_clock::now();
    const Partition partition = filter_and_split(
        data, point.devices, cfg.per_device, cfg.test_size, seed);
    const SimulationResult result =
        run_simulation(simulation_config(cfg, point, scheme, seed), partition);
    auto& rows = per_cell[c];
    for (const auto& r : result.rounds) {
      rows.push_back(MetricsRow{r.epoch, std::string(to_string(scheme)),
                                point.sigma_db, seed, r.accuracy, r.mean_loss,
                                r.n_pole_uploads, r.n_whole_uploads});
    }
    if (log) {
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
      std::lock_guard lock(log_mutex);
      *log << "[" << sigma_tag(point.sigma_db) << ' ' << point_tag(point) << "] "
           << to_string(scheme) << " seed=" << seed << " final_acc="
           << (rows.empty() ? 0.0 : rows.back().accuracy) << " (" << secs
           << "s)\n";
    }
  });

  std::vector<MetricsRow> rows;
  for (auto& cell : per_cell) {
    rows.insert(rows.end(), cell.begin(), cell.end());
  }
  return rows;
}

ExperimentOutputs run_experiment(const ExperimentConfig& cfg,
                                 std::ostream* log) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  write_text(cfg.out_dir / "resolved_config.txt", to_config_text(cfg));

  const MiniDataset data = load_dataset(cfg);
  const bool single_shape = cfg.devices.size() == 1 &&
                            cfg.local_iters.size() == 1 && cfg.batch.size() == 1;

  ExperimentOutputs outputs;
  // final mean accuracy per (point index, scheme)
  std::vector<std::map<std::string, double>> finals;
  const auto points = sweep_points(cfg);
  for (const auto& point : points) {
    const auto rows = run_sweep_point(cfg, data, point, log);
    const std::string tag = sigma_tag(point.sigma_db) + "_" + point_tag(point);

    const auto csv = cfg.out_dir / ("metrics_" + tag + ".csv");
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + csv.string());
    write_metrics_csv(out, rows);
    out.close();
    outputs.csv_files.push_back(csv);

    const auto curves = mean_curves(rows);
    std::map<std::string, double> final_acc;
    std::vector<PlotSeries> series;
    for (Scheme s : cfg.schemes) {
      const std::string name(to_string(s));
      const auto it = curves.find(name);
      if (it == curves.end()) continue;
      PlotSeries ps{name, {}};
      for (const auto& [epoch, acc] : it->second) ps.points.emplace_back(epoch, acc);
      if (!ps.points.empty()) final_acc[name] = ps.points.back().second;
      series.push_back(std::move(ps));
    }
    finals.push_back(final_acc);
    if (series.empty()) continue;

    const std::string comparison =
        single_shape ? "schemes" : "schemes_" + point_tag(point);
    const auto svg =
        cfg.out_dir / ("fig_" + comparison + "_" + sigma_tag(point.sigma_db) + ".svg");
    PlotSpec spec{"Test accuracy, sigma^2 = " + format_double(point.sigma_db) +
                      " dB, " + point_tag(point),
                  "epoch", "top-1 accuracy", 0.0, 1.0};
    write_text(svg, render_line_plot(spec, series));
    outputs.svg_files.push_back(svg);
  }

  // Final accuracy against each swept axis, the other axes at their first value.
  const std::vector<std::vector<int>> axes{cfg.devices, cfg.local_iters, cfg.batch};
  for (int axis = 0; axis < 3; ++axis) {
    if (axes[static_cast<std::size_t>(axis)].size() < 2) continue;
    for (double sigma : cfg.sigma_db) {
      std::vector<PlotSeries> series;
      for (Scheme s : cfg.schemes) {
        PlotSeries ps{std::string(to_string(s)), {}};
        for (std::size_t i = 0; i < points.size(); ++i) {
          const auto& p = points[i];
          const int values[] = {p.devices, p.local_iters, p.batch};
          const int firsts[] = {cfg.devices[0], cfg.local_iters[0], cfg.batch[0]};
          bool others_first = p.sigma_db == sigma;
          for (int other = 0; other < 3; ++other) {
            if (other != axis && values[other] != firsts[other]) others_first = false;
          }
          if (!others_first) continue;
          const auto it = finals[i].find(ps.name);
          if (it != finals[i].end()) ps.points.emplace_back(values[axis], it->second);
        }
        if (!ps.points.empty()) series.push_back(std::move(ps));
      }
      if (series.empty()) continue;
      const std::string name = sweep_axis_name(axis);
      const auto svg = cfg.out_dir / ("fig_" + name + "_" + sigma_tag(sigma) + ".svg");
      PlotSpec spec{"Final accuracy vs " + name + ", sigma^2 = " +
                        format_double(sigma) + " dB",
                    name, "final top-1 accuracy", 0.0, 1.0};
      write_text(svg, render_line_plot(spec, series));
      outputs.svg_files.push_back(svg);
    }
  }
  return outputs;
}

}  // namespace slimqfl
