#include "maskopt/sampling.hpp"

#include <stdexcept>

#include <spdlog/spdlog.h>

#include "maskopt/metrics.hpp"
#include "maskopt/random.hpp"

namespace maskopt {

namespace {
constexpr std::size_t kMaxRedraws = 1000;
}

BinaryMask binarize(const ProbMask& c, std::uint64_t seed) {
  Rng rng(seed);
  BinaryMask mask(c.width(), c.height());
  for (std::size_t i = 0; i < c.size(); ++i) mask.set(i, rng.unit() < c[i]);
  return mask;
}

SampledMask best_of(const ProbMask& c, const GrayImage& f, std::size_t samples,
                    std::uint64_t seed, const SolveConfig& cfg) {
  require_same_extent(c.extent(), f.extent(), "best_of");
  if (samples < 1) throw std::invalid_argument("best_of needs at least one sample");
  if (!(c.mean() > 0.0)) throw NoKnownDataError();

  SampledMask best;
  std::uint64_t stream = 0;
  while (best.samples < samples) {
    BinaryMask mask = binarize(c, derive_seed(seed, stream++));
    if (mask.count() == 0) {
      ++best.redraws;
      spdlog::info("best_of: discarded empty sample (redraw {})", best.redraws);
      if (best.redraws > kMaxRedraws) {
        throw ValidationError("best_of: confidence too small, every sample came out empty");
      }
      continue;
    }
    Solution sol = inpaint(f, mask, cfg);
    const double db = psnr(sol.image, f);
    if (best.samples == 0 || db > best.psnr_db) {
      best.mask = std::move(mask);
      best.reconstruction = std::move(sol.image);
      best.psnr_db = db;
    }
    ++best.samples;
  }
  return best;
}

}  // namespace maskopt
