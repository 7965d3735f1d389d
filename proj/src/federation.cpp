#include "slimqfl/federation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "slimqfl/parallel.hpp"

namespace slimqfl {
namespace {

template <typename Upload>
std::vector<const Upload*> by_device(std::span<const Upload> uploads) {
  std::vector<const Upload*> sorted;
  sorted.reserve(uploads.size());
  for (const auto& u : uploads) sorted.push_back(&u);
  std::sort(sorted.begin(), sorted.end(),
            [](const Upload* a, const Upload* b) {
              return a->device_id < b->device_id;
            });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->device_id == sorted[i - 1]->device_id) {
      throw std::invalid_argument("duplicate upload from device " +
                                  std::to_string(sorted[i]->device_id));
    }
  }
  return sorted;
}

// Mean of the engaged vectors picked by `get`, or prev when none are engaged.
template <typename Upload, typename Get>
std::vector<double> group_mean(const std::vector<const Upload*>& sorted,
                               std::span<const double> prev, Get get) {
  std::vector<double> sum(prev.size(), 0.0);
  int count = 0;
  for (const Upload* u : sorted) {
    const auto& values = get(*u);
    if (!values) continue;
    if (values->size() != prev.size()) {
      throw std::invalid_argument("upload from device " +
                                  std::to_string(u->device_id) +
                                  " has the wrong length");
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*values)[i];
    ++count;
  }
  if (count == 0) return {prev.begin(), prev.end()};
  for (double& s : sum) s /= count;
  return sum;
}

void sgd_step(std::vector<double>& values, const std::vector<double>& grad_sum,
              double lr, std::size_t batch) {
  const double scale = lr / static_cast<double>(batch);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] -= scale * grad_sum[i];
  }
}

void train_group(ModelParams& params, const MiniDataset& data,
                 const TrainSettings& settings, Rng& rng, ParamGroup group) {
  if (data.size() == 0) throw std::invalid_argument("empty shard");
  if (settings.batch <= 0) throw std::invalid_argument("batch must be positive");
  if (settings.local_iters < 0) {
    throw std::invalid_argument("local iterations must be >= 0");
  }
  const bool dense = group == ParamGroup::kClassical;
  if (dense != std::holds_alternative<DenseParams>(params)) {
    throw std::invalid_argument("parameter group does not match the model");
  }

  std::vector<std::size_t> order(data.size());
  const auto batch = static_cast<std::size_t>(settings.batch);
  for (int pass = 0; pass < settings.local_iters; ++pass) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      if (dense) {
        auto& p = std::get<DenseParams>(params);
        std::vector<double> sum(p.weights.size(), 0.0);
        for (std::size_t s = start; s < end; ++s) {
          const auto& img = data.images[order[s]];
          const auto g = nn_grad(img, data.labels[order[s]], p);
          for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
        }
        sgd_step(p.weights, sum, settings.lr, end - start);
        continue;
      }
      auto& p = std::get<QsnnParams>(params);
      auto& target = group == ParamGroup::kPole ? p.pole : p.angle;
      std::vector<double> sum(target.size(), 0.0);
      for (std::size_t s = start; s < end; ++s) {
        const EncodedInput input = to_input(data.images[order[s]]);
        const int label = data.labels[order[s]];
        const auto g = group == ParamGroup::kPole
                           ? grad_pole(input, label, p, settings.qsnn)
                           : grad_angle(input, label, p, settings.qsnn);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
      }
      sgd_step(target, sum, settings.lr, end - start);
    }
  }
}

std::vector<double> init_uniform(std::size_t n, double scale, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-scale, scale);
  return v;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kSlimQfl: return "slimqfl";
    case Scheme::kSlimQflPole: return "slimqfl_pole";
    case Scheme::kVanillaQfl: return "vanilla_qfl";
    case Scheme::kClassicalFl: return "classical_fl";
  }
  return "slimqfl";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : kAllSchemes) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

bool is_quantum(Scheme scheme) { return scheme != Scheme::kClassicalFl; }

std::string_view to_string(LrSchedule schedule) {
  return schedule == LrSchedule::kInverseTime ? "inverse_time" : "exponential";
}

LrSchedule parse_lr_schedule(std::string_view name) {
  if (name == "inverse_time") return LrSchedule::kInverseTime;
  if (name == "exponential") return LrSchedule::kExponential;
  throw std::invalid_argument("unknown lr schedule '" + std::string(name) + "'");
}

double lr_at(int epoch, double eta0, double decay, LrSchedule schedule) {
  if (epoch < 0) throw std::invalid_argument("epoch must be >= 0");
  if (schedule == LrSchedule::kExponential) {
    return eta0 * std::exp(-decay * epoch);
  }
  return eta0 / (1.0 + decay * epoch);
}

EncodedInput to_input(const MiniImage& image) {
  return EncodedInput{std::vector<double>(image.begin(), image.end())};
}

void local_train_single_group(DeviceState& dev, const TrainSettings& settings,
                              Rng& rng, ParamGroup group) {
  if (!dev.shard) throw std::invalid_argument("device has no shard");
  train_group(dev.local, dev.shard->samples, settings, rng, group);
}

void local_train_pole_to_angle(DeviceState& dev, const TrainSettings& settings,
                               Rng& rng) {
  local_train_single_group(dev, settings, rng, ParamGroup::kPole);
  local_train_single_group(dev, settings, rng, ParamGroup::kAngle);
}

QsnnParams aggregate_slim(std::span<const SlimUpload> uploads,
                          const QsnnParams& prev) {
  const auto sorted = by_device(uploads);
  QsnnParams out;
  out.pole = group_mean(sorted, prev.pole,
                        [](const SlimUpload& u) -> const auto& { return u.pole; });
  out.angle = group_mean(
      sorted, prev.angle,
      [](const SlimUpload& u) -> const auto& { return u.angle; });
  return out;
}

std::vector<double> aggregate_vanilla(std::span<const VanillaUpload> uploads,
                                      std::span<const double> prev) {
  const auto sorted = by_device(uploads);
  return group_mean(
      sorted, prev,
      [](const VanillaUpload& u) -> const auto& { return u.values; });
}

namespace {

std::vector<double> logits_for(const ModelParams& params,
                               const MiniImage& image, const QsnnConfig& qsnn) {
  if (const auto* dense = std::get_if<DenseParams>(&params)) {
    return nn_forward(image, *dense);
  }
  Observable obs = forward(to_input(image), std::get<QsnnParams>(params), qsnn);
  for (double& o : obs) o *= qsnn.observable_scale;
  return obs;
}

}  // namespace

double evaluate(const ModelParams& params, const MiniDataset& test,
                const QsnnConfig& qsnn) {
  if (test.size() == 0) throw std::invalid_argument("empty test set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (argmax(logits_for(params, test.images[i], qsnn)) == test.labels[i]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

double mean_loss(const ModelParams& params, const MiniDataset& data,
                 const QsnnConfig& qsnn) {
  if (data.size() == 0) throw std::invalid_argument("empty dataset");
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    // Logits already carry the observable scale.
    total += loss(logits_for(params, data.images[i], qsnn), data.labels[i], 1.0);
  }
  return total / static_cast<double>(data.size());
}

RoundRecord run_round(const RoundContext& ctx, std::vector<DeviceState>& devices,
                      GlobalModel& global, const MiniDataset& test) {
  ctx.channel.validate();
  const int t = global.epoch;
  const TrainSettings& settings = ctx.train;  // lr is this round's rate
  const std::size_t n = devices.size();

  std::vector<ChannelOutcome> outcomes(n);
  for (std::size_t d = 0; d < n; ++d) {
    devices[d].local = global.params;  // perfect downlink
    Rng channel_rng(ctx.master_seed,
                    static_cast<std::uint64_t>(devices[d].shard->device_id),
                    static_cast<std::uint64_t>(t), Purpose::kChannel);
    outcomes[d] = draw_channel(channel_rng, ctx.channel);
  }

  parallel_for(n, ctx.threads, [&](std::size_t d) {
    DeviceState& dev = devices[d];
    Rng rng(ctx.master_seed, static_cast<std::uint64_t>(dev.shard->device_id),
            static_cast<std::uint64_t>(t), Purpose::kShuffle);
    const Transmission decision = outcomes[d].decision;
    const bool skip = ctx.skip_discarded_work;
    switch (ctx.scheme) {
      case Scheme::kSlimQfl:
        if (decision == Transmission::kWhole || !skip) {
          local_train_pole_to_angle(dev, settings, rng);
        } else if (decision == Transmission::kPoleOnly) {
          // Identical draws to the first phase of pole-to-angle training.
          local_train_single_group(dev, settings, rng, ParamGroup::kPole);
        }
        break;
      case Scheme::kSlimQflPole:
        if (decision != Transmission::kNone || !skip) {
          local_train_single_group(dev, settings, rng, ParamGroup::kPole);
        }
        break;
      case Scheme::kVanillaQfl:
        if (decision == Transmission::kWhole || !skip) {
          local_train_single_group(dev, settings, rng, ParamGroup::kAngle);
        }
        break;
      case Scheme::kClassicalFl:
        if (decision == Transmission::kWhole || !skip) {
          local_train_single_group(dev, settings, rng, ParamGroup::kClassical);
        }
        break;
    }
  });

  RoundRecord rec;
  rec.epoch = t + 1;
  rec.decisions.reserve(n);
  for (const auto& o : outcomes) rec.decisions.push_back(o.decision);

  if (ctx.scheme == Scheme::kClassicalFl || ctx.scheme == Scheme::kVanillaQfl) {
    std::vector<VanillaUpload> uploads;
    for (std::size_t d = 0; d < n; ++d) {
      VanillaUpload u{devices[d].shard->device_id, std::nullopt};
      if (outcomes[d].decision == Transmission::kWhole) {
        if (const auto* dense = std::get_if<DenseParams>(&devices[d].local)) {
          u.values = dense->weights;
        } else {
          u.values = std::get<QsnnParams>(devices[d].local).angle;
        }
        ++rec.n_pole_uploads;
        ++rec.n_whole_uploads;
      }
      uploads.push_back(std::move(u));
    }
    if (auto* dense = std::get_if<DenseParams>(&global.params)) {
      dense->weights = aggregate_vanilla(uploads, dense->weights);
    } else {
      auto& q = std::get<QsnnParams>(global.params);
      q.angle = aggregate_vanilla(uploads, q.angle);
    }
  } else {
    const bool sends_angle = ctx.scheme == Scheme::kSlimQfl;
    std::vector<SlimUpload> uploads;
    for (std::size_t d = 0; d < n; ++d) {
      const auto& local = std::get<QsnnParams>(devices[d].local);
      SlimUpload u{devices[d].shard->device_id, std::nullopt, std::nullopt};
      if (outcomes[d].decision != Transmission::kNone) {
        u.pole = local.pole;
        ++rec.n_pole_uploads;
      }
      if (sends_angle && outcomes[d].decision == Transmission::kWhole) {
        u.angle = local.angle;
        ++rec.n_whole_uploads;
      }
      uploads.push_back(std::move(u));
    }
    auto& q = std::get<QsnnParams>(global.params);
    q = aggregate_slim(uploads, q);
  }

  global.epoch = t + 1;
  rec.accuracy = evaluate(global.params, test, settings.qsnn);
  double loss_sum = 0.0;
  std::size_t loss_count = 0;
  for (const auto& dev : devices) {
    loss_sum += mean_loss(global.params, dev.shard->samples, settings.qsnn) *
                static_cast<double>(dev.shard->samples.size());
    loss_count += dev.shard->samples.size();
  }
  rec.mean_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
  return rec;
}

ModelParams initial_params(const SimulationConfig& cfg) {
  Rng rng(cfg.seed, kServerStream, 0, Purpose::kInit);
  if (cfg.scheme == Scheme::kClassicalFl) {
    DenseParams p;
    if (cfg.classical_56) p.input_mask = DenseParams::corner_drop_mask();
    for (std::size_t i = 0; i < DenseParams::kInputs; ++i) {
      for (std::size_t k = 0; k < DenseParams::kClasses; ++k) {
        const double w = rng.uniform(-cfg.init_scale, cfg.init_scale);
        p.at(i, k) = p.input_mask[i] ? w : 0.0;
      }
    }
    return p;
  }
  QsnnParams p;
  p.angle = init_uniform(cfg.qsnn.angle_count(), cfg.init_scale, rng);
  p.pole = init_uniform(cfg.qsnn.pole_count(), cfg.init_scale, rng);
  if (cfg.scheme == Scheme::kVanillaQfl) {
    std::fill(p.pole.begin(), p.pole.end(), 0.0);
  }
  return p;
}

SimulationResult run_simulation(const SimulationConfig& cfg,
                                const Partition& partition,
                                const RoundObserver& observer) {
  cfg.qsnn.validate();
  cfg.channel.validate();
  if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (partition.shards.empty()) throw std::invalid_argument("no devices");

  std::vector<DeviceState> devices;
  devices.reserve(partition.shards.size());
  for (const auto& shard : partition.shards) {
    devices.push_back(
        DeviceState{std::make_shared<const DeviceShard>(shard), ModelParams{}});
  }

  SimulationResult result;
  result.initial = initial_params(cfg);
  GlobalModel global{result.initial, 0};

  RoundContext ctx;
  ctx.scheme = cfg.scheme;
  ctx.channel = cfg.channel;
  ctx.train.local_iters = cfg.local_iters;
  ctx.train.batch = cfg.batch;
  ctx.train.qsnn = cfg.qsnn;
  ctx.master_seed = cfg.seed;
  ctx.skip_discarded_work = cfg.skip_discarded_work;
  ctx.threads = cfg.threads;

  result.rounds.reserve(static_cast<std::size_t>(cfg.epochs));
  for (int t = 0; t < cfg.epochs; ++t) {
    ctx.train.lr = lr_at(t, cfg.eta0, cfg.decay, cfg.schedule);
    result.rounds.push_back(run_round(ctx, devices, global, partition.test));
    if (observer) observer(result.rounds.back(), global, devices);
  }
  result.final_model = std::move(global);
  return result;
}

}  // namespace slimqfl
