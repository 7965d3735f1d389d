#include "slimqfl/experiment_config.hpp"

#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "slimqfl/metrics.hpp"

namespace slimqfl {
namespace {

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    if constexpr (std::is_floating_point_v<T>) {
      out << format_double(values[i]);
    } else {
      out << values[i];
    }
  }
  return out.str();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(!schemes.empty(), "at least one scheme is required");
  require(!sigma_db.empty(), "at least one --sigma-db value is required");
  for (double db : sigma_db) require(std::isfinite(db), "--sigma-db must be finite");
  require(!devices.empty(), "at least one --devices value is required");
  for (int n : devices) require(n > 0, "--devices must be positive");
  require(!local_iters.empty(), "at least one --local-iters value is required");
  for (int l : local_iters) require(l >= 0, "--local-iters must be >= 0");
  require(!batch.empty(), "at least one --batch value is required");
  for (int b : batch) require(b > 0, "--batch must be positive");
  require(epochs >= 0, "--epochs must be >= 0");
  require(lr > 0.0 && std::isfinite(lr), "--lr must be positive");
  require(decay >= 0.0 && std::isfinite(decay), "--decay must be >= 0");
  require(w > 0.0 && std::isfinite(w), "--w must be positive");
  require(layers >= 0, "--layers must be >= 0");
  require(u_pole.has_value() == u_whole.has_value(),
          "--u-pole and --u-whole must be given together");
  if (u_pole) {
    require(*u_pole >= 0.0 && *u_whole >= *u_pole && std::isfinite(*u_whole),
            "thresholds must satisfy 0 <= u-pole <= u-whole");
  }
  require(!seeds.empty(), "at least one seed is required");
  require(per_device > 0, "--per-device must be positive");
  require(test_size > 0, "--test-size must be positive");
  require(classical_params == 64 || classical_params == 56,
          "--classical-params must be 64 or 56");
  require(synthetic_count > 0, "--synthetic-count must be positive");
  require(threads > 0, "--threads must be positive");
}

std::optional<ExperimentConfig> load_config(std::span<const std::string> args) {
  ExperimentConfig cfg;
  cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  CLI::App app{"Slimmable quantum federated learning simulator", "slimqfl"};
  app.set_config("--config", "", "Flat key = value file; keys are flag names");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::vector<std::string> schemes;
  std::string schedule = std::string(to_string(cfg.lr_schedule));
  std::optional<std::uint64_t> seed;
  double u_pole = 0.0, u_whole = 0.0;

  app.add_option("--scheme", schemes,
                 "Schemes: slimqfl, slimqfl_pole, vanilla_qfl, classical_fl, all")
      ->delimiter(',');
  app.add_option("--sigma-db", cfg.sigma_db, "Noise power in dB (list)")
      ->delimiter(',');
  app.add_option("--devices", cfg.devices, "Number of devices N (list)")
      ->delimiter(',');
  app.add_option("--local-iters", cfg.local_iters,
                 "Local passes L per training phase (list)")
      ->delimiter(',');
  app.add_option("--epochs", cfg.epochs, "Communication rounds E");
  app.add_option("--batch", cfg.batch, "Mini-batch size B (list)")
      ->delimiter(',');
  auto* seed_opt = app.add_option("--seed", seed, "Single master seed");
  app.add_option("--seeds", cfg.seeds, "Master seeds (list)")
      ->delimiter(',')
      ->excludes(seed_opt);
  auto* up = app.add_option("--u-pole", u_pole, "Pole payload rate threshold");
  auto* uw = app.add_option("--u-whole", u_whole, "Whole payload rate threshold");
  app.add_option("--lr", cfg.lr, "Initial learning rate");
  app.add_option("--decay", cfg.decay, "Learning-rate decay");
  app.add_option("--lr-schedule", schedule, "inverse_time or exponential");
  app.add_option("--w", cfg.w, "Observable scale applied to logits");
  app.add_option("--layers", cfg.layers, "Circuit layers");
  app.add_option("--per-device", cfg.per_device, "Samples per device");
  app.add_option("--test-size", cfg.test_size, "Held-out test samples");
  app.add_option("--classical-params", cfg.classical_params,
                 "Classical baseline size, 64 or 56");
  app.add_option("--data-dir", cfg.data_dir, "Directory with MNIST IDX files");
  app.add_option("--out-dir", cfg.out_dir, "Output directory");
  app.add_flag("--synthetic-data", cfg.synthetic_data,
               "Use the built-in synthetic digits instead of MNIST");
  app.add_option("--synthetic-count", cfg.synthetic_count,
                 "Synthetic images to generate");
  app.add_option("--data-seed", cfg.data_seed, "Seed of the synthetic dataset");
  app.add_option("--threads", cfg.threads, "Worker threads");

  std::vector<std::string> argv_storage{"slimqfl"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }

  if (!schemes.empty()) {
    cfg.schemes.clear();
    for (const auto& name : schemes) {
      if (name == "all") {
        cfg.schemes.assign(std::begin(kAllSchemes), std::end(kAllSchemes));
      } else {
        cfg.schemes.push_back(parse_scheme(name));
      }
    }
  }
  if (seed) cfg.seeds = {*seed};
  if (up->count() > 0) cfg.u_pole = u_pole;
  if (uw->count() > 0) cfg.u_whole = u_whole;
  cfg.lr_schedule = parse_lr_schedule(schedule);
  cfg.validate();
  return cfg;
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::vector<std::string> schemes;
  for (Scheme s : cfg.schemes) schemes.emplace_back(to_string(s));
  std::ostringstream out;
  out << "scheme = " << join(schemes) << '\n'
      << "sigma-db = " << join(cfg.sigma_db) << '\n'
      << "devices = " << join(cfg.devices) << '\n'
      << "local-iters = " << join(cfg.local_iters) << '\n'
      << "epochs = " << cfg.epochs << '\n'
      << "batch = " << join(cfg.batch) << '\n'
      << "seeds = " << join(cfg.seeds) << '\n';
  if (cfg.u_pole) {
    out << "u-pole = " << format_double(*cfg.u_pole) << '\n'
        << "u-whole = " << format_double(*cfg.u_whole) << '\n';
  }
  out << "lr = " << format_double(cfg.lr) << '\n'
      << "decay = " << format_double(cfg.decay) << '\n'
      << "lr-schedule = " << to_string(cfg.lr_schedule) << '\n'
      << "w = " << format_double(cfg.w) << '\n'
      << "layers = " << cfg.layers << '\n'
      << "per-device = " << cfg.per_device << '\n'
      << "test-size = " << cfg.test_size << '\n'
      << "classical-params = " << cfg.classical_params << '\n'
      << "data-dir = \"" << cfg.data_dir.string() << "\"\n"
      << "out-dir = \"" << cfg.out_dir.string() << "\"\n"
      << "synthetic-data = " << (cfg.synthetic_data ? "true" : "false") << '\n'
      << "synthetic-count = " << cfg.synthetic_count << '\n'
      << "data-seed = " << cfg.data_seed << '\n';
  return out.str();
}

}  // namespace slimqfl
