#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "slimqfl/channel.hpp"
#include "slimqfl/classical_nn.hpp"
#include "slimqfl/mini_mnist.hpp"
#include "slimqfl/qsnn.hpp"
#include "slimqfl/rng.hpp"

namespace slimqfl {

enum class Scheme { kSlimQfl, kSlimQflPole, kVanillaQfl, kClassicalFl };

inline constexpr Scheme kAllSchemes[] = {Scheme::kSlimQfl, Scheme::kSlimQflPole,
                                         Scheme::kVanillaQfl,
                                         Scheme::kClassicalFl};

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);
bool is_quantum(Scheme scheme);

enum class ParamGroup { kPole, kAngle, kClassical };

enum class LrSchedule { kInverseTime, kExponential };

std::string_view to_string(LrSchedule schedule);
LrSchedule parse_lr_schedule(std::string_view name);

/// Inverse-time decay eta0 / (1 + decay * t), or eta0 * exp(-decay * t).
double lr_at(int epoch, double eta0, double decay,
             LrSchedule schedule = LrSchedule::kInverseTime);

using ModelParams = std::variant<QsnnParams, DenseParams>;

struct GlobalModel {
  ModelParams params;
  int epoch = 0;  // completed rounds
};

struct DeviceState {
  std::shared_ptr<const DeviceShard> shard;
  ModelParams local;
};

struct TrainSettings {
  int local_iters = 10;
  double lr = 0.01;
  int batch = 32;
  QsnnConfig qsnn;
};

/// L shuffled passes of mini-batch SGD on one parameter group; gradients are
/// averaged over each batch and the last partial batch is kept.
void local_train_single_group(DeviceState& dev, const TrainSettings& settings,
                              Rng& rng, ParamGroup group);

/// L passes on the poles with the angles frozen, then L passes on the angles
/// with the trained poles frozen.
void local_train_pole_to_angle(DeviceState& dev, const TrainSettings& settings,
                               Rng& rng);

struct SlimUpload {
  int device_id = 0;
  std::optional<std::vector<double>> pole;
  std::optional<std::vector<double>> angle;
};

struct VanillaUpload {
  int device_id = 0;
  std::optional<std::vector<double>> values;
};

/// Group-wise mean of received poles and received angles. A group with no
/// receptions keeps its previous global value. Summation runs in device-id
/// order, so the result does not depend on upload order.
QsnnParams aggregate_slim(std::span<const SlimUpload> uploads,
                          const QsnnParams& prev);

/// Mean over successful uploads; prev when there are none.
std::vector<double> aggregate_vanilla(std::span<const VanillaUpload> uploads,
                                      std::span<const double> prev);

/// Top-1 accuracy; ties resolve to the lowest class index.
double evaluate(const ModelParams& params, const MiniDataset& test,
                const QsnnConfig& qsnn);

double mean_loss(const ModelParams& params, const MiniDataset& data,
                 const QsnnConfig& qsnn);

EncodedInput to_input(const MiniImage& image);

struct RoundRecord {
  int epoch = 0;  // 1-based
  std::vector<Transmission> decisions;
  int n_pole_uploads = 0;   // sum of c_theta
  int n_whole_uploads = 0;  // sum of c_phi
  double accuracy = 0.0;
  double mean_loss = 0.0;   // global model over all device shards
};

struct RoundContext {
  Scheme scheme = Scheme::kSlimQfl;
  ChannelConfig channel;
  TrainSettings train;
  std::uint64_t master_seed = 0;
  /// Skip local training whose result the channel will discard anyway. The
  /// channel draw comes from its own substream, so this never changes results.
  bool skip_discarded_work = true;
  int threads = 1;
};

/// Broadcast, local training, channel-gated upload, aggregation and
/// evaluation for epoch index global.epoch. Advances global.epoch.
RoundRecord run_round(const RoundContext& ctx, std::vector<DeviceState>& devices,
                      GlobalModel& global, const MiniDataset& test);

struct SimulationConfig {
  Scheme scheme = Scheme::kSlimQfl;
  int local_iters = 10;
  int batch = 32;
  int epochs = 200;
  double eta0 = 0.01;
  double decay = 0.001;
  LrSchedule schedule = LrSchedule::kInverseTime;
  QsnnConfig qsnn;
  ChannelConfig channel;
  std::uint64_t seed = 1;
  double init_scale = 0.3141592653589793;  // pi / 10
  bool classical_56 = false;
  bool skip_discarded_work = true;
  int threads = 1;
};

/// Initial global model drawn from the seed's init substream. Angles are drawn
/// before poles, so SlimQFL and Vanilla QFL share initial angles per seed.
ModelParams initial_params(const SimulationConfig& cfg);

struct SimulationResult {
  ModelParams initial;
  GlobalModel final_model;
  std::vector<RoundRecord> rounds;
};

using RoundObserver = std::function<void(
    const RoundRecord&, const GlobalModel&, std::span<const DeviceState>)>;

SimulationResult run_simulation(const SimulationConfig& cfg,
                                const Partition& partition,
                                const RoundObserver& observer = {});

}  // namespace slimqfl
