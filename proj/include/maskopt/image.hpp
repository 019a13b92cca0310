#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maskopt {

// Error hierarchy. Everything thrown for bad data derives from DataError so
// the CLI can map it to a single exit status.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FormatError : DataError {
  using DataError::DataError;
};

struct DimensionError : DataError {
  using DataError::DataError;
};

struct ValidationError : DataError {
  using DataError::DataError;
};

struct NoKnownDataError : DataError {
  NoKnownDataError() : DataError("no known data") {}
};

struct IoError : DataError {
  using DataError::DataError;
};

// Width/height pair shared by all grids. Row-major indexing: i = y*width + x.
struct Extent {
  std::size_t width = 0;
  std::size_t height = 0;

  std::size_t size() const { return width * height; }
  std::size_t index(std::size_t x, std::size_t y) const { return y * width + x; }
  friend bool operator==(const Extent&, const Extent&) = default;
};

std::string to_string(const Extent& e);

// Throws DimensionError naming `what` when the extents differ.
void require_same_extent(const Extent& a, const Extent& b, const char* what);

/// Greyscale image with real intensities, nominally in [0,255].
///
/// Values are not clamped; intermediate results (Laplacians, residuals)
/// reuse this container and may be negative. Clamping happens only when
/// writing an 8-bit file.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(std::size_t width, std::size_t height, double fill = 0.0);
  GrayImage(std::size_t width, std::size_t height, std::vector<double> data);

  const Extent& extent() const { return extent_; }
  std::size_t width() const { return extent_.width; }
  std::size_t height() const { return extent_.height; }
  std::size_t size() const { return data_.size(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t x, std::size_t y) { return data_[extent_.index(x, y)]; }
  double at(std::size_t x, std::size_t y) const { return data_[extent_.index(x, y)]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  Extent extent_;
  std::vector<double> data_;
};

/// Set of known pixels. A set bit means the pixel value is kept.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(std::size_t width, std::size_t height, bool fill = false);
  BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits);

  const Extent& extent() const { return extent_; }
  std::size_t width() const { return extent_.width; }
  std::size_t height() const { return extent_.height; }
  std::size_t size() const { return bits_.size(); }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  bool at(std::size_t x, std::size_t y) const { return bits_[extent_.index(x, y)] != 0; }
  void set(std::size_t i, bool known) { bits_[i] = known ? 1 : 0; }

  std::size_t count() const;
  std::vector<std::size_t> known_indices() const;
  std::vector<std::size_t> unknown_indices() const;
  std::span<const std::uint8_t> bits() const { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  Extent extent_;
  std::vector<std::uint8_t> bits_;
};

/// Per-pixel confidence in [0,1]. The range is enforced on construction.
class ProbMask {
 public:
  ProbMask() = default;
  ProbMask(std::size_t width, std::size_t height, double fill = 0.0);
  // Throws ValidationError with the first offending index when a value is
  // outside [0,1] or not finite.
  ProbMask(std::size_t width, std::size_t height, std::vector<double> prob);

  static ProbMask from_binary(const BinaryMask& mask);

  const Extent& extent() const { return extent_; }
  std::size_t width() const { return extent_.width; }
  std::size_t height() const { return extent_.height; }
  std::size_t size() const { return prob_.size(); }

  double operator[](std::size_t i) const { return prob_[i]; }
  std::span<const double> values() const { return prob_; }
  double mean() const;

  friend bool operator==(const ProbMask&, const ProbMask&) = default;

 private:
  Extent extent_;
  std::vector<double> prob_;
};

}  // namespace maskopt
