#pragma once

// Test-only helpers: synthetic images and brute-force oracles that do not
// share code paths with the library.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "maskopt/image.hpp"
#include "maskopt/random.hpp"

namespace maskopt::testing {

// Piecewise-smooth 8-bit test image: a tilted gradient, a few overlapping
// discs and boxes with hard edges, a smooth ripple and mild pixel noise,
// rounded to integers.
inline GrayImage synthetic_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  Rng rng(seed);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * rng.unit(); };
  GrayImage img(w, h);
  const double gx = uni(-0.6, 0.6) * 128.0 / static_cast<double>(w);
  const double gy = uni(-0.6, 0.6) * 128.0 / static_cast<double>(h);
  const double base = uni(70, 150);
  const double fx = uni(2, 6) * 2 * M_PI / static_cast<double>(w);
  const double fy = uni(2, 6) * 2 * M_PI / static_cast<double>(h);
  const double amp = uni(6, 18);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      img.at(x, y) = base + gx * x + gy * y + amp * std::sin(fx * x) * std::cos(fy * y);

  const int shapes = 4 + static_cast<int>(rng.below(4));
  for (int s = 0; s < shapes; ++s) {
    const double cx = uni(0, w), cy = uni(0, h);
    const double rx = uni(0.08, 0.3) * w, ry = uni(0.08, 0.3) * h;
    const double shift = uni(-80, 80);
    const bool disc = rng.below(2) == 0;
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double dx = (x - cx) / rx, dy = (y - cy) / ry;
        const bool inside = disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1 && std::abs(dy) <= 1;
        if (inside) img.at(x, y) += shift;
      }
    }
  }
  for (std::size_t i = 0; i < img.size(); ++i) {
    img[i] = std::round(std::clamp(img[i] + uni(-3, 3), 0.0, 255.0));
  }
  return img;
}

// Uniform random intensities in [0,255).
inline GrayImage random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  Rng rng(seed);
  GrayImage img(w, h);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = 255.0 * rng.unit();
  return img;
}

// Each pixel known with probability `fraction`; at least one pixel known.
inline BinaryMask random_mask(std::size_t w, std::size_t h, double fraction, std::uint64_t seed) {
  Rng rng(seed);
  BinaryMask m(w, h);
  for (std::size_t i = 0; i < m.size(); ++i) m.set(i, rng.unit() < fraction);
  if (m.count() == 0) m.set(rng.below(m.size()), true);
  return m;
}

// Dense matrix of the 5-point reflecting-boundary Laplacian, assembled
// entry by entry from the stencil definition.
inline std::vector<std::vector<double>> dense_laplacian(std::size_t w, std::size_t h) {
  const std::size_t n = w * h;
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = y * w + x;
      const long nb[4][2] = {{(long)x - 1, (long)y}, {(long)x + 1, (long)y},
                             {(long)x, (long)y - 1}, {(long)x, (long)y + 1}};
      for (const auto& p : nb) {
        long px = p[0], py = p[1];
        // Mirror: an off-grid neighbour is the centre itself.
        if (px < 0 || px >= (long)w || py < 0 || py >= (long)h) {
          px = (long)x;
          py = (long)y;
        }
        a[i][py * w + px] += 1.0;
      }
      a[i][i] -= 4.0;
    }
  }
  return a;
}

// Cholesky factorisation succeeds iff the matrix is (numerically) SPD.
inline bool cholesky_ok(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
    if (!(d > 1e-12)) return false;
    a[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
      a[i][j] = s / a[j][j];
    }
  }
  return true;
}

// Gaussian elimination with partial pivoting; used to solve small
// inpainting problems exactly.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// Exact solution of (I - C) A u - C (u - f) = 0 by dense elimination.
inline std::vector<double> dense_inpaint(const GrayImage& f, const std::vector<double>& c) {
  const std::size_t w = f.width(), h = f.height(), n = f.size();
  auto a = dense_laplacian(w, h);
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = (1.0 - c[i]) * a[i][j];
    m[i][i] -= c[i];
    rhs[i] = -c[i] * f[i];
  }
  return dense_solve(std::move(m), std::move(rhs));
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("maskopt_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace maskopt::testing
