#include "slimqfl/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace slimqfl {

std::string_view to_string(Transmission t) {
  switch (t) {
    case Transmission::kNone: return "none";
    case Transmission::kPoleOnly: return "pole";
    case Transmission::kWhole: return "whole";
  }
  return "none";
}

void ChannelConfig::validate() const {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw std::invalid_argument("noise power must be positive");
  }
  if (!(u_pole >= 0.0) || !(u_whole >= u_pole) || !std::isfinite(u_whole)) {
    throw std::invalid_argument("thresholds must satisfy 0 <= u_pole <= u_whole");
  }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double sample_gain(Rng& rng) { return rng.exponential(); }

double throughput(double gain, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("noise power must be positive");
  if (gain < 0.0) throw std::invalid_argument("gain must be nonnegative");
  return std::log2(1.0 + gain / sigma2);
}

Transmission decide(double rate, const ChannelConfig& cfg) {
  if (rate >= cfg.u_whole) return Transmission::kWhole;
  if (rate >= cfg.u_pole) return Transmission::kPoleOnly;
  return Transmission::kNone;
}

double success_probability(double u, double sigma2) {
  if (u < 0.0) throw std::invalid_argument("rate must be nonnegative");
  return std::exp(-sigma2 * (std::exp2(u) - 1.0));
}

ChannelOutcome draw_channel(Rng& rng, const ChannelConfig& cfg) {
  ChannelOutcome out;
  out.gain = sample_gain(rng);
  out.throughput = throughput(out.gain, cfg.sigma2);
  out.decision = decide(out.throughput, cfg);
  return out;
}

Thresholds calibrate_thresholds(int pole_params, int whole_params,
                                double anchor_sigma_db, double target_whole) {
  if (pole_params <= 0 || whole_params < pole_params) {
    throw std::invalid_argument("payload sizes must satisfy 0 < pole <= whole");
  }
  if (!(target_whole > 0.0 && target_whole < 1.0)) {
    throw std::invalid_argument("target probability must be in (0, 1)");
  }
  // exp(-s (2^u - 1)) = p  =>  u = log2(1 - ln(p) / s)
  const double sigma2 = db_to_linear(anchor_sigma_db);
  const double u_whole = std::log2(1.0 - std::log(target_whole) / sigma2);
  const double per_param = u_whole / whole_params;
  return Thresholds{per_param * pole_params, u_whole};
}

}  // namespace slimqfl
