// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero
// if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "slimqfl/channel.hpp"
#include "slimqfl/experiment.hpp"
#include "slimqfl/experiment_config.hpp"
#include "slimqfl/federation.hpp"
#include "slimqfl/qsnn.hpp"
#include "slimqfl/rng.hpp"
#include "slimqfl/state_vector.hpp"

using namespace slimqfl;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kPi = std::numbers::pi;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << detail
            << std::endl;
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

// 1. Shift-rule gradients vs central finite differences.
void gradient_fidelity() {
  const auto t0 = Clock::now();
  const QsnnConfig cfg;
  Rng rng(1001);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    EncodedInput in{std::vector<double>(16)};
    for (double& x : in.features) x = rng.uniform(0.0, kPi);
    QsnnParams p = QsnnParams::zeros(cfg);
    for (double& v : p.pole) v = rng.uniform(-kPi, kPi);
    for (double& v : p.angle) v = rng.uniform(-kPi, kPi);
    const int label = static_cast<int>(rng.below(4));
    const auto f_pole = [&](const std::vector<double>& x) {
      QsnnParams q = p;
      q.pole = x;
      return loss(forward(in, q, cfg), label, cfg.observable_scale);
    };
    const auto f_angle = [&](const std::vector<double>& x) {
      QsnnParams q = p;
      q.angle = x;
      return loss(forward(in, q, cfg), label, cfg.observable_scale);
    };
    worst = std::max(worst, oracle::relative_error(grad_pole(in, label, p, cfg),
                                                   oracle::central_difference(f_pole, p.pole, 1e-5)));
    worst = std::max(worst,
                     oracle::relative_error(grad_angle(in, label, p, cfg),
                                            oracle::central_difference(f_angle, p.angle, 1e-5)));
  }
  const double secs = seconds_since(t0);
  report(1, "gradient fidelity", worst <= 1e-5 && secs < 60.0,
         "max relative error " + fmt(worst, 3) + " (tol 1e-5), " + fmt(secs, 3) + " s (limit 60 s)");
}

// 2. Statevector kernels vs explicit unitaries; norm over long sequences.
void quantum_core_oracle() {
  Rng rng(1002);
  double worst_amp = 0.0, worst_norm = 0.0;
  const char axes[] = {'X', 'Y', 'Z'};
  for (int n = 1; n <= 3; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      StateVector s(n);
      std::vector<oracle::C> ref(std::size_t{1} << n, 0.0);
      ref[0] = 1.0;
      for (int g = 0; g < 100; ++g) {
        const int q = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        if (n > 1 && rng.below(4) == 0) {
          int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
          if (c >= q) ++c;
          s.cnot(c, q);
          ref = oracle::apply(oracle::cnot(c, q, n), ref);
        } else {
          const int a = static_cast<int>(rng.below(3));
          const double d = rng.uniform(-2 * kPi, 2 * kPi);
          s.rotate(static_cast<Axis>(a), q, d);
          ref = oracle::apply(oracle::lift(oracle::rotation(axes[a], d), q, n), ref);
        }
        for (std::size_t i = 0; i < ref.size(); ++i) {
          worst_amp = std::max(worst_amp, std::abs(s[i] - ref[i]));
        }
      }
      worst_norm = std::max(worst_norm, std::abs(s.norm_squared() - 1.0));
    }
  }
  for (int trial = 0; trial < 50; ++trial) {
    StateVector s(4);
    for (int g = 0; g < 100; ++g) {
      const int q = static_cast<int>(rng.below(4));
      if (rng.below(4) == 0) {
        s.cnot(q, (q + 1) % 4);
      } else {
        s.rotate(static_cast<Axis>(rng.below(3)), q, rng.uniform(-2 * kPi, 2 * kPi));
      }
    }
    worst_norm = std::max(worst_norm, std::abs(s.norm_squared() - 1.0));
  }
  report(2, "quantum-core oracle", worst_amp <= 1e-12 && worst_norm <= 1e-10,
         "max amplitude deviation " + fmt(worst_amp, 3) + " (tol 1e-12), max norm drift " +
             fmt(worst_norm, 3) + " (tol 1e-10)");
}

// 3. Monte Carlo P(R >= u) vs closed form.
void channel_oracle() {
  const auto th = calibrate_thresholds();
  const int n = 100'000;
  bool ok = true;
  double worst_z = 0.0;
  for (double db : {-20.0, -30.0, -40.0}) {
    const double s2 = db_to_linear(db);
    for (double u : {th.u_pole, th.u_whole}) {
      Rng rng(substream_seed(1003, static_cast<std::uint64_t>(-db), 0, Purpose::kTest));
      int hits = 0;
      for (int i = 0; i < n; ++i) hits += throughput(sample_gain(rng), s2) >= u;
      const double p = std::exp(-s2 * (std::exp2(u) - 1.0));
      const double sd = std::sqrt(p * (1.0 - p) / n);
      const double dev = std::abs(static_cast<double>(hits) / n - p);
      const double z = sd > 0 ? dev / sd : (dev == 0 ? 0.0 : INFINITY);
      worst_z = std::max(worst_z, z);
      ok = ok && dev <= 3.0 * sd;
    }
  }
  report(3, "channel oracle", ok,
         "worst deviation " + fmt(worst_z, 3) + " binomial sd over 6 (sigma, u) cells (tol 3)");
}

// 4. Degenerate channel equivalences.
void degenerate_channel(const MiniDataset& data) {
  Rng rng(1004);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + static_cast<int>(rng.below(10));
    QsnnParams prev = QsnnParams::zeros(QsnnConfig{});
    std::vector<SlimUpload> slim;
    std::vector<VanillaUpload> poles, angles;
    for (int d = 0; d < n; ++d) {
      std::vector<double> pole(4), angle(36);
      for (double& v : pole) v = rng.uniform(-kPi, kPi);
      for (double& v : angle) v = rng.uniform(-kPi, kPi);
      slim.push_back({d, pole, angle});
      poles.push_back({d, pole});
      angles.push_back({d, angle});
    }
    const auto g = aggregate_slim(slim, prev);
    const auto vp = aggregate_vanilla(poles, prev.pole);
    const auto va = aggregate_vanilla(angles, prev.angle);
    for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(g.pole[i] - vp[i]));
    for (std::size_t i = 0; i < 36; ++i) worst = std::max(worst, std::abs(g.angle[i] - va[i]));
  }

  const Partition part = filter_and_split(data, 1, 64, 128, 1004);
  SimulationConfig cfg;
  cfg.scheme = Scheme::kSlimQfl;
  cfg.epochs = 3;
  cfg.seed = 1004;
  cfg.channel = ChannelConfig{1e-4, 0.0, 0.0};
  const auto result = run_simulation(cfg, part);

  // Standalone pole-to-angle training written out from the gradient functions.
  const MiniDataset& shard = part.shards[0].samples;
  QsnnParams ref = std::get<QsnnParams>(initial_params(cfg));
  for (int t = 0; t < cfg.epochs; ++t) {
    Rng shuffle(cfg.seed, 0, static_cast<std::uint64_t>(t), Purpose::kShuffle);
    const double lr = cfg.eta0 / (1.0 + cfg.decay * t);
    for (bool pole : {true, false}) {
      for (int it = 0; it < cfg.local_iters; ++it) {
        std::vector<std::size_t> order(shard.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        shuffle.shuffle(std::span<std::size_t>(order));
        for (std::size_t s = 0; s < order.size(); s += static_cast<std::size_t>(cfg.batch)) {
          const std::size_t e = std::min(order.size(), s + static_cast<std::size_t>(cfg.batch));
          auto& target = pole ? ref.pole : ref.angle;
          std::vector<double> sum(target.size(), 0.0);
          for (std::size_t i = s; i < e; ++i) {
            const auto& img = shard.images[order[i]];
            EncodedInput in{std::vector<double>(img.begin(), img.end())};
            const auto gi = pole ? grad_pole(in, shard.labels[order[i]], ref, cfg.qsnn)
                                 : grad_angle(in, shard.labels[order[i]], ref, cfg.qsnn);
            for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += gi[j];
          }
          for (std::size_t j = 0; j < sum.size(); ++j) {
            target[j] -= lr / static_cast<double>(e - s) * sum[j];
          }
        }
      }
    }
  }
  const auto& got = std::get<QsnnParams>(result.final_model.params);
  double traj = 0.0;
  for (std::size_t i = 0; i < 4; ++i) traj = std::max(traj, std::abs(got.pole[i] - ref.pole[i]));
  for (std::size_t i = 0; i < 36; ++i) traj = std::max(traj, std::abs(got.angle[i] - ref.angle[i]));
  report(4, "degenerate-channel equivalence", worst <= 1e-12 && traj <= 1e-12,
         "slim vs groupwise vanilla max diff " + fmt(worst, 3) +
             ", N=1 SlimQFL vs standalone training max diff " + fmt(traj, 3) + " (tol 1e-12)");
}

struct CellResult {
  double final_accuracy = 0.0;
  bool invariants_ok = true;
  std::string violation;
};

struct Runner {
  ExperimentConfig cfg;
  MiniDataset data;
  std::map<std::pair<Scheme, double>, std::vector<CellResult>> cells;
  std::map<std::pair<Scheme, double>, double> wall;

  const std::vector<CellResult>& run(Scheme scheme, double sigma_db) {
    const auto key = std::make_pair(scheme, sigma_db);
    if (auto it = cells.find(key); it != cells.end()) return it->second;
    const auto t0 = Clock::now();
    SweepPoint point{sigma_db, cfg.devices[0], cfg.local_iters[0], cfg.batch[0]};
    std::vector<CellResult> out(cfg.seeds.size());
    const int threads = std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < std::min<int>(threads, static_cast<int>(out.size())); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < out.size();) {
          const auto seed = cfg.seeds[i];
          const Partition part =
              filter_and_split(data, point.devices, cfg.per_device, cfg.test_size, seed);
          const SimulationConfig sim = simulation_config(cfg, point, scheme, seed);
          const ModelParams init = initial_params(sim);
          CellResult& cell = out[i];
          const auto observer = [&](const RoundRecord& rec, const GlobalModel& g,
                                    std::span<const DeviceState>) {
            auto fail = [&](const std::string& why) {
              if (cell.invariants_ok) {
                cell.violation = std::string(to_string(scheme)) + " seed " +
                                 std::to_string(seed) + " epoch " +
                                 std::to_string(rec.epoch) + ": " + why;
              }
              cell.invariants_ok = false;
            };
            if (rec.n_whole_uploads > rec.n_pole_uploads) fail("sum c_phi > sum c_theta");
            if (scheme == Scheme::kVanillaQfl &&
                std::get<QsnnParams>(g.params).pole != std::vector<double>(4, 0.0)) {
              fail("vanilla poles moved");
            }
            if (scheme == Scheme::kSlimQflPole &&
                std::get<QsnnParams>(g.params).angle != std::get<QsnnParams>(init).angle) {
              fail("pole-only angles moved");
            }
          };
          const auto result = run_simulation(sim, part, observer);
          cell.final_accuracy = result.rounds.empty() ? 0.0 : result.rounds.back().accuracy;
        }
      });
    }
    for (auto& t : pool) t.join();
    wall[key] = seconds_since(t0);
    std::cerr << "  ran " << to_string(scheme) << " at " << sigma_db << " dB over "
              << out.size() << " seeds in " << fmt(wall[key], 4) << " s" << std::endl;
    return cells[key] = std::move(out);
  }

  double mean_final(Scheme scheme, double sigma_db) {
    const auto& r = run(scheme, sigma_db);
    double s = 0.0;
    for (const auto& c : r) s += c.final_accuracy;
    return s / static_cast<double>(r.size());
  }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 9. Repeated runs produce byte-identical CSV files.
void determinism(const ExperimentConfig& base) {
  const auto root = std::filesystem::temp_directory_path() / "slimqfl_acceptance_det";
  std::filesystem::remove_all(root);
  ExperimentConfig cfg = base;
  cfg.epochs = 5;
  cfg.sigma_db = {-30.0};
  cfg.seeds = {7};
  std::string first, second;
  for (int rep = 0; rep < 2; ++rep) {
    cfg.out_dir = root / std::to_string(rep);
    cfg.threads = rep == 0 ? 1 : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    const auto out = run_experiment(cfg);
    (rep == 0 ? first : second) = slurp(out.csv_files.at(0));
  }
  std::filesystem::remove_all(root);
  report(9, "determinism", !first.empty() && first == second,
         "two runs of 4 schemes x 5 epochs, " + std::to_string(first.size()) +
             " CSV bytes each, " + (first == second ? "identical" : "different"));
}

}  // namespace

int main() {
  std::cout << std::unitbuf;
  gradient_fidelity();
  quantum_core_oracle();
  channel_oracle();

  auto parsed = load_config(std::vector<std::string>{"--synthetic-data"});
  Runner runner{*parsed, load_dataset(*parsed), {}, {}};
  degenerate_channel(runner.data);
  determinism(runner.cfg);

  const double good = -40.0, poor = -20.0;
  const double slim_good = runner.mean_final(Scheme::kSlimQfl, good);
  const double slim_time = runner.wall[{Scheme::kSlimQfl, good}];
  report(5, "learning happens", slim_good >= 0.60 && slim_time <= 1800.0,
         "SlimQFL at -40 dB mean final accuracy " + fmt(slim_good) + " over " +
             std::to_string(runner.cfg.seeds.size()) + " seeds (floor 0.60), " +
             fmt(slim_time, 4) + " s (limit 1800 s)");

  const double pole_good = runner.mean_final(Scheme::kSlimQflPole, good);
  report(6, "pole-only trainability", pole_good - 0.25 >= 0.05,
         "SlimQFL-Pole at -40 dB mean final accuracy " + fmt(pole_good) +
             " (needs >= 0.30)");

  const double slim_poor = runner.mean_final(Scheme::kSlimQfl, poor);
  const double van_poor = runner.mean_final(Scheme::kVanillaQfl, poor);
  report(7, "channel-robustness ordering", slim_poor - van_poor >= 0.05,
         "at -20 dB SlimQFL " + fmt(slim_poor) + " vs Vanilla QFL " + fmt(van_poor) +
             ", gap " + fmt(slim_poor - van_poor) + " (needs >= 0.05)");

  const double van_good = runner.mean_final(Scheme::kVanillaQfl, good);
  report(8, "good-channel parity",
         std::abs(slim_good - van_good) <= 0.10 && slim_good > pole_good && van_good > pole_good,
         "at -40 dB SlimQFL " + fmt(slim_good) + ", Vanilla QFL " + fmt(van_good) +
             ", SlimQFL-Pole " + fmt(pole_good) + "; |gap| " + fmt(std::abs(slim_good - van_good)) +
             " (tol 0.10), both above pole-only");

  bool inv_ok = true;
  std::string first_violation;
  int runs = 0;
  for (const auto& [key, results] : runner.cells) {
    for (const auto& c : results) {
      ++runs;
      if (!c.invariants_ok && inv_ok) first_violation = c.violation;
      inv_ok = inv_ok && c.invariants_ok;
    }
  }
  report(10, "scheme invariants", inv_ok,
         inv_ok ? "held every epoch of " + std::to_string(runs) + " runs" : first_violation);

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
