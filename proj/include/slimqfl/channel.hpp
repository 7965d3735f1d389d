#pragma once

#include <string_view>

#include "slimqfl/rng.hpp"

namespace slimqfl {

/// What a device manages to deliver in one round.
enum class Transmission { kNone, kPoleOnly, kWhole };

std::string_view to_string(Transmission t);

/// Rayleigh block-fading uplink. Thresholds are code rates in bits/s/Hz; a
/// payload gets through when the throughput reaches its rate.
struct ChannelConfig {
  double sigma2 = 1e-4;  // linear noise power
  double u_pole = 0.0;
  double u_whole = 0.0;

  /// 0 <= u_pole <= u_whole and sigma2 > 0. Equal zero thresholds give a
  /// channel on which every upload succeeds.
  void validate() const;
};

struct ChannelOutcome {
  double gain = 0.0;
  double throughput = 0.0;
  Transmission decision = Transmission::kNone;
};

double db_to_linear(double db);

/// Exponential(1) power gain.
double sample_gain(Rng& rng);

/// log2(1 + g / sigma2).
double throughput(double gain, double sigma2);

/// WHOLE iff R >= u_whole, POLE_ONLY iff u_pole <= R < u_whole, else NONE.
Transmission decide(double rate, const ChannelConfig& cfg);

/// P(R >= u) = exp(-sigma2 * (2^u - 1)) for an exponential(1) gain.
double success_probability(double u, double sigma2);

ChannelOutcome draw_channel(Rng& rng, const ChannelConfig& cfg);

struct Thresholds {
  double u_pole = 0.0;
  double u_whole = 0.0;
};

/// Rates proportional to payload size, u = c * params, with c solved so that
/// the whole payload succeeds with probability target_whole at the anchor
/// noise level.
Thresholds calibrate_thresholds(int pole_params = 4, int whole_params = 40,
                                double anchor_sigma_db = -40.0,
                                double target_whole = 0.95);

}  // namespace slimqfl
