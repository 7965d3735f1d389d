#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace slimqfl {

inline constexpr std::string_view kMetricsHeader =
    "epoch,scheme,sigma_db,seed,accuracy,mean_loss,n_pole_uploads,"
    "n_whole_uploads";

struct MetricsRow {
  int epoch = 0;
  std::string scheme;
  double sigma_db = 0.0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double mean_loss = 0.0;
  int n_pole_uploads = 0;
  int n_whole_uploads = 0;

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

/// Reads a file written by write_metrics_csv; the header must match exactly.
std::vector<MetricsRow> read_metrics_csv(std::istream& in);

}  // namespace slimqfl
