#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "maskopt/image.hpp"

namespace maskopt {

class ReducedSystem;

// z = M^{-1} r on the unknown-pixel vector. Must be symmetric positive
// definite for CG to stay valid.
using Preconditioner =
    std::function<void(const ReducedSystem&, std::span<const double> r, std::span<double> z)>;

// Called after every binary-mask solve with (f, mask, u).
using SolveObserver =
    std::function<void(const GrayImage& f, const BinaryMask& mask, const GrayImage& u)>;

enum class Preconditioning { none, modified_incomplete_cholesky };

struct SolveConfig {
  double tol = 1e-6;          // relative residual ||b - Ax|| / ||b||
  std::size_t max_iter = 0;   // 0 selects 10 * pixel count
  Preconditioning preconditioning = Preconditioning::modified_incomplete_cholesky;
  Preconditioner preconditioner;  // overrides `preconditioning` when set
  SolveObserver observer;

  std::size_t resolved_max_iter(std::size_t pixels) const {
    return max_iter == 0 ? 10 * pixels : max_iter;
  }
  // Throws std::invalid_argument on tol <= 0 or non-finite tol.
  void validate() const;
};

struct SolveStats {
  std::size_t iterations = 0;
  double final_relative_residual = 0.0;
  bool hit_max_iter = false;
  bool counted_as_inpainting = false;
};

struct Solution {
  GrayImage image;
  SolveStats stats;
};

/// Homogeneous diffusion system restricted to the unknown pixels.
///
/// Known values are moved to the right-hand side, leaving the graph
/// Laplacian of the unknown pixels: (Lx)_k = deg_k x_k - sum of unknown
/// neighbours. L is symmetric positive definite as long as at least one
/// pixel is known.
class ReducedSystem {
 public:
  ReducedSystem(const GrayImage& f, const BinaryMask& mask);

  std::size_t unknown_count() const { return pixel_.size(); }
  std::span<const std::uint32_t> unknown_pixels() const { return pixel_; }
  std::span<const double> rhs() const { return rhs_; }
  std::span<const double> diagonal() const { return diag_; }
  // Neighbour slots of unknown k; value unknown_count() marks "no unknown
  // neighbour here".
  const std::array<std::uint32_t, 4>& neighbours(std::size_t k) const { return nbr_[k]; }

  // y = L x. Both spans have unknown_count() entries.
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  std::vector<std::uint32_t> pixel_;
  std::vector<std::array<std::uint32_t, 4>> nbr_;
  std::vector<double> diag_;
  std::vector<double> rhs_;
};

/// Binary-mask homogeneous diffusion inpainting by conjugate gradients.
///
/// Known pixels are copied from f bit-exactly. Unknown pixels solve the
/// reduced system from a zero start (or from `initial_guess` when given),
/// then are clamped to the range of known values, which the exact solution
/// satisfies by the maximum principle. Throws NoKnownDataError for an empty
/// mask. Hitting max_iter is reported in the stats, not thrown.
Solution inpaint(const GrayImage& f, const BinaryMask& mask, const SolveConfig& cfg = {});
Solution inpaint(const GrayImage& f, const BinaryMask& mask, const SolveConfig& cfg,
                 const GrayImage& initial_guess);

/// Damped Jacobi fixed-point iteration on (1-c) A u - c (u - f) = 0 for a
/// general confidence c. Starts from u = f and stops once the residual loss
/// drops to tol^2 * mean(f^2). Slow, but independent of the CG path.
Solution inpaint_jacobi(const GrayImage& f, const ProbMask& c, const SolveConfig& cfg = {},
                        double damping = 0.9);

/// Counts inpaintings on the current thread while alive. Scopes nest; a
/// solve increments every scope on the thread's stack.
class InpaintingScope {
 public:
  InpaintingScope();
  ~InpaintingScope();
  InpaintingScope(const InpaintingScope&) = delete;
  InpaintingScope& operator=(const InpaintingScope&) = delete;

  std::size_t count() const { return count_.load(std::memory_order_relaxed); }

 private:
  friend void record_inpainting();
  InpaintingScope* parent_;
  std::atomic<std::size_t> count_{0};
};

// Inpaintings seen by the innermost scope on this thread (0 outside any scope).
std::size_t inpainting_counter();
// Process-wide total, never reset.
std::size_t total_inpaintings();
void record_inpainting();

}  // namespace maskopt
