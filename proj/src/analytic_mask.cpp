#include "maskopt/analytic_mask.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "maskopt/laplace.hpp"

namespace maskopt {

namespace {

constexpr int kBisectionSteps = 60;

double clamped_mean(const std::vector<double>& m, double scale) {
  double sum = 0.0;
  for (double v : m) sum += std::min(1.0, scale * v);
  return sum / static_cast<double>(m.size());
}

}  // namespace

double DitherField::mean() const {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

DitherField belhachmi_field(const GrayImage& f, double target_density) {
  if (!(target_density > 0.0 && target_density <= 1.0)) {
    throw std::invalid_argument(
        fmt::format("target density must lie in (0,1], got {}", target_density));
  }
  DitherField field{f.extent(), {}};
  const std::size_t n = f.size();
  if (n == 0) return field;

  const GrayImage lap = laplacian_apply(f);
  std::vector<double> mag(n);
  std::size_t support = 0;
  double min_positive = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    mag[i] = std::abs(lap[i]);
    if (mag[i] > 0.0) {
      ++support;
      min_positive = std::min(min_positive, mag[i]);
    }
  }

  if (support == 0) {
    field.values.assign(n, target_density);
    return field;
  }

  const double support_fraction = static_cast<double>(support) / static_cast<double>(n);
  if (support_fraction <= target_density) {
    // Saturated: the whole support is certain, the rest shares what is left.
    const double rest = n - support == 0
                            ? 0.0
                            : (target_density * n - support) / static_cast<double>(n - support);
    field.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) field.values[i] = mag[i] > 0.0 ? 1.0 : rest;
    return field;
  }

  // mean(clamp(s*m)) is continuous and nondecreasing in s; at s = 1/min_positive
  // every support pixel saturates, giving support_fraction > target.
  double lo = 0.0;
  double hi = 1.0 / min_positive;
  for (int step = 0; step < kBisectionSteps; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (clamped_mean(mag, mid) < target_density) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double scale = 0.5 * (lo + hi);
  field.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) field.values[i] = std::min(1.0, scale * mag[i]);
  return field;
}

BinaryMask floyd_steinberg(const DitherField& field) {
  const std::size_t w = field.extent.width;
  const std::size_t h = field.extent.height;
  std::vector<double> buf = field.values;
  BinaryMask mask(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      const double old = buf[i];
      const bool on = old >= 0.5;
      mask.set(i, on);
      const double err = old - (on ? 1.0 : 0.0);
      // Border pixels share their error among the in-grid targets only.
      const bool right = x + 1 < w, down = y + 1 < h, left = x > 0;
      double total = right ? 7.0 : 0.0;
      if (down) total += 5.0 + (left ? 3.0 : 0.0) + (right ? 1.0 : 0.0);
      if (total == 0.0) continue;
      const double unit = err / total;
      if (right) buf[i + 1] += 7.0 * unit;
      if (down) {
        if (left) buf[i + w - 1] += 3.0 * unit;
        buf[i + w] += 5.0 * unit;
        if (right) buf[i + w + 1] += unit;
      }
    }
  }
  return mask;
}

BinaryMask mask_belhachmi(const GrayImage& f, double target_density) {
  return floyd_steinberg(belhachmi_field(f, target_density));
}

}  // namespace maskopt
