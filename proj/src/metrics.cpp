#include "slimqfl/metrics.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace slimqfl {
namespace {

template <typename T>
T parse_field(std::string_view text, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                         value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::runtime_error("bad CSV field '" + std::string(text) +
                             "' on line " + std::to_string(line));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.epoch << ',' << r.scheme << ',' << format_double(r.sigma_db) << ','
        << r.seed << ',' << format_double(r.accuracy) << ','
        << format_double(r.mean_loss) << ',' << r.n_pole_uploads << ','
        << r.n_whole_uploads << '\n';
  }
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw std::runtime_error("unexpected metrics CSV header");
  }
  std::vector<MetricsRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 8) {
      throw std::runtime_error("expected 8 CSV fields on line " +
                               std::to_string(line_no));
    }
    MetricsRow r;
    r.epoch = parse_field<int>(f[0], line_no);
    r.scheme = std::string(f[1]);
    r.sigma_db = parse_field<double>(f[2], line_no);
    r.seed = parse_field<std::uint64_t>(f[3], line_no);
    r.accuracy = parse_field<double>(f[4], line_no);
    r.mean_loss = parse_field<double>(f[5], line_no);
    r.n_pole_uploads = parse_field<int>(f[6], line_no);
    r.n_whole_uploads = parse_field<int>(f[7], line_no);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace slimqfl
