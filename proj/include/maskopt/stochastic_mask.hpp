#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "maskopt/image.hpp"
#include "maskopt/solver.hpp"

namespace maskopt {

// What q selects among the candidates of one sparsification step.
enum class PsUpdate {
  keep_lowest_error,     // the ceil(q*k) lowest-error candidates leave the mask
  restore_highest_error  // the ceil(q*k) highest-error candidates go back
};

struct PsConfig {
  double p = 0.1;   // fraction of the current mask drawn as candidates
  double q = 0.05;  // see PsUpdate
  PsUpdate update = PsUpdate::keep_lowest_error;
  double density = 0.05;  // target
  std::size_t runs = 5;
  std::uint64_t seed = 0;
  SolveConfig solve;

  void validate() const;
};

struct NlpeConfig {
  std::size_t candidates = 30;  // non-mask pixels examined per iteration
  std::size_t swap = 10;        // pixels exchanged per iteration
  std::size_t cycles = 10;
  std::uint64_t seed = 0;
  SolveConfig solve;

  void validate() const;
};

enum class Phase { sparsification, exchange };

struct TraceEntry {
  Phase phase = Phase::sparsification;
  std::size_t iteration = 0;
  double density = 0.0;
  double mse = 0.0;
  bool accepted = false;
};

struct OptimizationTrace {
  std::vector<TraceEntry> entries;
  std::size_t inpaintings = 0;
};

struct MaskResult {
  BinaryMask mask;
  GrayImage reconstruction;  // inpainting of `mask`
  double mse = 0.0;
  OptimizationTrace trace;
};

// Number of mask pixels for density d on n pixels: ceil(d*n), robust to
// products like 0.01*10000 landing one ulp above an integer.
std::size_t target_pixel_count(double density, std::size_t pixels);

/// Probabilistic sparsification.
///
/// Each iteration draws k = ceil(p*m) candidates from the m current mask
/// pixels, removes them, inpaints once, and ranks them by |u - f| (ties to
/// the lower index). With keep_lowest_error the ceil(q*k) lowest-error
/// candidates stay out and the rest go back, shrinking the mask by about
/// p*q per step. With restore_highest_error the ceil(q*k) highest-error
/// candidates go back (never all k). The step that would undershoot removes
/// exactly enough to land on target_pixel_count(). Every run ends with one more inpainting of its
/// final mask, used to pick the best of cfg.runs runs. The trace holds the
/// winning run; `inpaintings` counts all runs.
MaskResult probabilistic_sparsification(const GrayImage& f, const PsConfig& cfg);

/// Nonlocal pixel exchange at constant density.
///
/// Each iteration draws cfg.candidates non-mask pixels, activates the
/// cfg.swap of them with the largest |u - f|, deactivates cfg.swap
/// uniformly drawn mask pixels, inpaints once, and keeps the exchange only
/// if the MSE strictly drops. A cycle is ceil(m / swap) iterations. When
/// `initial` is absent the starting reconstruction costs one extra
/// inpainting.
MaskResult nonlocal_pixel_exchange(const GrayImage& f, const BinaryMask& mask,
                                   const NlpeConfig& cfg);
MaskResult nonlocal_pixel_exchange(const GrayImage& f, const BinaryMask& mask,
                                   const NlpeConfig& cfg, const GrayImage& initial);

/// PS followed by NLPE on its result; traces concatenated, counts summed.
MaskResult ps_nlpe(const GrayImage& f, const PsConfig& ps, const NlpeConfig& nlpe);

// CSV with header "iteration,density,mse,accepted,phase"; phase is "ps" or "nlpe".
void write_trace_csv(const OptimizationTrace& trace, std::ostream& out);

}  // namespace maskopt
