#include "maskopt/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace maskopt {

std::string to_string(const Extent& e) { return fmt::format("{}x{}", e.width, e.height); }

void require_same_extent(const Extent& a, const Extent& b, const char* what) {
  if (a != b) {
    throw DimensionError(
        fmt::format("dimension mismatch in {}: {} vs {}", what, to_string(a), to_string(b)));
  }
}

GrayImage::GrayImage(std::size_t width, std::size_t height, double fill)
    : extent_{width, height}, data_(width * height, fill) {}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> data)
    : extent_{width, height}, data_(std::move(data)) {
  if (data_.size() != extent_.size()) {
    throw DimensionError(fmt::format("image data has {} values, expected {} for {}",
                                     data_.size(), extent_.size(), to_string(extent_)));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw ValidationError(fmt::format("non-finite intensity at index {}", i));
    }
  }
}

BinaryMask::BinaryMask(std::size_t width, std::size_t height, bool fill)
    : extent_{width, height}, bits_(width * height, fill ? 1 : 0) {}

BinaryMask::BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits)
    : extent_{width, height}, bits_(std::move(bits)) {
  if (bits_.size() != extent_.size()) {
    throw DimensionError(fmt::format("mask has {} entries, expected {} for {}", bits_.size(),
                                     extent_.size(), to_string(extent_)));
  }
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> BinaryMask::known_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> BinaryMask::unknown_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (!bits_[i]) out.push_back(i);
  return out;
}

ProbMask::ProbMask(std::size_t width, std::size_t height, double fill)
    : ProbMask(width, height, std::vector<double>(width * height, fill)) {}

ProbMask::ProbMask(std::size_t width, std::size_t height, std::vector<double> prob)
    : extent_{width, height}, prob_(std::move(prob)) {
  if (prob_.size() != extent_.size()) {
    throw DimensionError(fmt::format("probability mask has {} entries, expected {} for {}",
                                     prob_.size(), extent_.size(), to_string(extent_)));
  }
  for (std::size_t i = 0; i < prob_.size(); ++i) {
    const double v = prob_[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError(
          fmt::format("probability out of [0,1] at index {}: {}", i, v));
    }
  }
}

ProbMask ProbMask::from_binary(const BinaryMask& mask) {
  std::vector<double> p(mask.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = mask[i] ? 1.0 : 0.0;
  return ProbMask(mask.width(), mask.height(), std::move(p));
}

double ProbMask::mean() const {
  if (prob_.empty()) return 0.0;
  return std::accumulate(prob_.begin(), prob_.end(), 0.0) / static_cast<double>(prob_.size());
}

}  // namespace maskopt
