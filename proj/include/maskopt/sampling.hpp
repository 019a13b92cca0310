#pragma once

#include <cstdint>

#include "maskopt/image.hpp"
#include "maskopt/solver.hpp"

namespace maskopt {

// Independent weighted coin flip per pixel: set with probability c_i.
BinaryMask binarize(const ProbMask& c, std::uint64_t seed);

struct SampledMask {
  BinaryMask mask;
  GrayImage reconstruction;
  double psnr_db = 0.0;
  std::size_t samples = 0;  // inpainted samples
  std::size_t redraws = 0;  // empty draws discarded before inpainting
};

/// Best of `samples` binarisations by PSNR of their inpainting.
///
/// Sample k uses the RNG stream derive_seed(seed, k), so the first k
/// samples of a larger call are exactly the samples of a call with k.
/// Empty draws are skipped without an inpainting and logged; exactly
/// `samples` inpaintings happen. Ties keep the earliest sample.
SampledMask best_of(const ProbMask& c, const GrayImage& f, std::size_t samples,
                    std::uint64_t seed, const SolveConfig& cfg = {});

}  // namespace maskopt
