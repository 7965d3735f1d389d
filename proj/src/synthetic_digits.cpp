#include "slimqfl/synthetic_digits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "slimqfl/rng.hpp"

namespace slimqfl {
namespace {

struct Point {
  double x;
  double y;
};

using Stroke = std::vector<Point>;

// Glyph skeletons in a box of roughly x in [-0.5, 0.5], y in [-0.8, 0.8]
// (y grows downwards).
std::vector<Stroke> glyph(int digit, Rng& rng) {
  switch (digit) {
    case 0: {
      Stroke ring;
      const double rx = rng.uniform(0.32, 0.5);
      const double ry = rng.uniform(0.65, 0.8);
      for (int i = 0; i <= 24; ++i) {
        const double a = 2.0 * std::numbers::pi * i / 24.0;
        ring.push_back({rx * std::cos(a), ry * std::sin(a)});
      }
      return {ring};
    }
    case 1: {
      std::vector<Stroke> strokes{{{0.05, -0.8}, {-0.05, 0.8}}};
      if (rng.uniform01() < 0.5) strokes.push_back({{-0.22, -0.52}, {0.05, -0.8}});
      if (rng.uniform01() < 0.25) strokes.push_back({{-0.25, 0.8}, {0.2, 0.8}});
      return strokes;
    }
    case 2:
      return {{{-0.4, -0.45}, {-0.25, -0.72}, {0.05, -0.8}, {0.32, -0.68},
               {0.42, -0.42}, {0.3, -0.12}, {-0.45, 0.78}, {0.48, 0.78}}};
    default:
      return {{{-0.4, -0.65}, {-0.1, -0.8}, {0.25, -0.75}, {0.4, -0.5},
               {0.3, -0.2}, {0.0, -0.05}, {0.3, 0.05}, {0.45, 0.35},
               {0.35, 0.65}, {0.0, 0.8}, {-0.4, 0.68}}};
  }
}

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = p.x - (a.x + t * dx), ey = p.y - (a.y + t * dy);
  return std::sqrt(ex * ex + ey * ey);
}

RawImage render(int digit, Rng& rng) {
  auto strokes = glyph(digit, rng);

  const double scale = rng.uniform(9.0, 12.0);
  const double aspect = rng.uniform(0.8, 1.2);
  const double slant = rng.uniform(-0.3, 0.3);
  const double rot = rng.uniform(-0.25, 0.25);
  const double cx = 14.0 + rng.uniform(-2.0, 2.0);
  const double cy = 14.0 + rng.uniform(-2.0, 2.0);
  const double half_width = rng.uniform(0.8, 1.9);
  const double ink = rng.uniform(0.75, 1.0);
  const double cr = std::cos(rot), sr = std::sin(rot);

  for (auto& stroke : strokes) {
    for (auto& p : stroke) {
      const double jx = p.x + rng.uniform(-0.07, 0.07);
      const double jy = p.y + rng.uniform(-0.07, 0.07);
      const double sx = (jx + slant * jy) * aspect;
      p = {cx + scale * (cr * sx - sr * jy), cy + scale * (sr * sx + cr * jy)};
    }
  }

  RawImage img{};
  for (std::size_t r = 0; r < kMnistSide; ++r) {
    for (std::size_t c = 0; c < kMnistSide; ++c) {
      const Point p{static_cast<double>(c) + 0.5, static_cast<double>(r) + 0.5};
      double d = 1e9;
      for (const auto& stroke : strokes) {
        for (std::size_t i = 0; i + 1 < stroke.size(); ++i) {
          d = std::min(d, segment_distance(p, stroke[i], stroke[i + 1]));
        }
      }
      const double coverage = std::clamp(1.0 - (d - half_width), 0.0, 1.0);
      img[r * kMnistSide + c] =
          static_cast<std::uint8_t>(std::lround(255.0 * ink * coverage));
    }
  }
  return img;
}

}  // namespace

RawDataset make_synthetic_digits(std::size_t count, std::uint64_t seed) {
  RawDataset ds;
  ds.images.reserve(count);
  ds.labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int digit = static_cast<int>(i % 4);
    Rng rng(seed, i, 0, Purpose::kSynthetic);
    ds.images.push_back(render(digit, rng));
    ds.labels.push_back(static_cast<std::uint8_t>(digit));
  }
  return ds;
}

}  // namespace slimqfl
