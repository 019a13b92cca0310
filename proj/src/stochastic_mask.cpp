#include "maskopt/stochastic_mask.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

#include "maskopt/metrics.hpp"
#include "maskopt/random.hpp"

namespace maskopt {

namespace {

std::size_t ceil_count(double x) {
  return static_cast<std::size_t>(std::ceil(x * (1.0 - 1e-12)));
}

// Sorts pixel indices by descending |u - f|, ties to the lower index.
void sort_by_error_desc(std::vector<std::size_t>& idx, const GrayImage& u, const GrayImage& f) {
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double ea = std::abs(u[a] - f[a]);
    const double eb = std::abs(u[b] - f[b]);
    if (ea != eb) return ea > eb;
    return a < b;
  });
}

struct PsRun {
  MaskResult result;
  std::size_t iterations = 0;
};

PsRun sparsify_once(const GrayImage& f, const PsConfig& cfg, std::uint64_t seed) {
  const std::size_t n = f.size();
  const std::size_t target = target_pixel_count(cfg.density, n);
  Rng rng(seed);

  PsRun run;
  BinaryMask mask(f.width(), f.height(), true);
  GrayImage u = f;
  std::size_t m = n;
  while (m > target) {
    const std::vector<std::size_t> known = mask.known_indices();
    const std::size_t k = std::clamp<std::size_t>(ceil_count(cfg.p * m), 1, m - 1);
    std::vector<std::size_t> cand = rng.sample(std::span<const std::size_t>(known), k);
    for (std::size_t i : cand) mask.set(i, false);

    u = inpaint(f, mask, cfg.solve, u).image;
    const double err = mse(u, f);

    std::size_t removed = 0;
    if (cfg.update == PsUpdate::keep_lowest_error) {
      removed = std::max<std::size_t>(1, ceil_count(cfg.q * static_cast<double>(k)));
    } else {
      removed = k - std::min(ceil_count(cfg.q * static_cast<double>(k)), k - 1);
    }
    removed = std::min({removed, k, m - target});
    const std::size_t restore = k - removed;
    sort_by_error_desc(cand, u, f);
    for (std::size_t j = 0; j < restore; ++j) mask.set(cand[j], true);
    m = m - k + restore;

    ++run.iterations;
    run.result.trace.entries.push_back(
        {Phase::sparsification, run.iterations,
         static_cast<double>(m) / static_cast<double>(n), err, true});
  }
  Solution final_solve = inpaint(f, mask, cfg.solve, u);
  run.result.mse = mse(final_solve.image, f);
  run.result.reconstruction = std::move(final_solve.image);
  run.result.mask = std::move(mask);
  return run;
}

MaskResult exchange(const GrayImage& f, const BinaryMask& start, const NlpeConfig& cfg,
                    GrayImage u, std::size_t already_counted) {
  Rng rng(cfg.seed);
  const std::size_t n = f.size();
  const std::size_t m = start.count();
  const std::size_t per_cycle = (m + cfg.swap - 1) / cfg.swap;
  const std::size_t iterations = per_cycle * cfg.cycles;

  MaskResult res;
  res.mask = start;
  res.mse = mse(u, f);
  res.trace.inpaintings = already_counted;
  const double dens = static_cast<double>(m) / static_cast<double>(n);

  for (std::size_t it = 1; it <= iterations; ++it) {
    const std::vector<std::size_t> outside = res.mask.unknown_indices();
    const std::vector<std::size_t> inside = res.mask.known_indices();
    std::vector<std::size_t> cand =
        rng.sample(std::span<const std::size_t>(outside), cfg.candidates);
    sort_by_error_desc(cand, u, f);
    const std::size_t s = std::min({cfg.swap, cand.size(), inside.size()});
    const std::vector<std::size_t> drop = rng.sample(std::span<const std::size_t>(inside), s);

    BinaryMask trial = res.mask;
    for (std::size_t j = 0; j < s; ++j) trial.set(cand[j], true);
    for (std::size_t i : drop) trial.set(i, false);

    Solution sol = inpaint(f, trial, cfg.solve, u);
    ++res.trace.inpaintings;
    const double err = mse(sol.image, f);
    const bool accepted = err < res.mse;
    res.trace.entries.push_back({Phase::exchange, it, dens, err, accepted});
    if (accepted) {
      res.mask = std::move(trial);
      u = std::move(sol.image);
      res.mse = err;
    }
  }
  res.reconstruction = std::move(u);
  spdlog::debug("nlpe: {} iterations, final mse {:.6f}", iterations, res.mse);
  return res;
}

void require_proper_mask(const GrayImage& f, const BinaryMask& mask) {
  require_same_extent(f.extent(), mask.extent(), "nonlocal_pixel_exchange");
  const std::size_t m = mask.count();
  if (m == 0 || m == mask.size()) {
    throw ValidationError(
        fmt::format("pixel exchange needs a mask with density strictly between 0 and 1, got {}",
                    density(mask)));
  }
}

}  // namespace

std::size_t target_pixel_count(double density, std::size_t pixels) {
  const std::size_t t = ceil_count(density * static_cast<double>(pixels));
  return std::clamp<std::size_t>(t, 1, pixels);
}

void PsConfig::validate() const {
  solve.validate();
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument(fmt::format("p must lie in (0,1], got {}", p));
  }
  if (!(q >= 0.0 && q < 1.0)) {
    throw std::invalid_argument(fmt::format("q must lie in [0,1), got {}", q));
  }
  if (!(density > 0.0 && density < 1.0)) {
    throw std::invalid_argument(fmt::format("target density must lie in (0,1), got {}", density));
  }
  if (runs < 1) throw std::invalid_argument("runs must be at least 1");
}

void NlpeConfig::validate() const {
  solve.validate();
  if (swap < 1 || swap > candidates) {
    throw std::invalid_argument(
        fmt::format("need 1 <= swap <= candidates, got swap={} candidates={}", swap, candidates));
  }
}

MaskResult probabilistic_sparsification(const GrayImage& f, const PsConfig& cfg) {
  cfg.validate();
  if (f.size() < 2) throw ValidationError("sparsification needs at least two pixels");

  MaskResult best;
  std::size_t total = 0;
  for (std::size_t r = 0; r < cfg.runs; ++r) {
    PsRun run = sparsify_once(f, cfg, derive_seed(cfg.seed, r));
    total += run.iterations + 1;
    spdlog::debug("ps run {}: {} iterations, mse {:.6f}", r, run.iterations, run.result.mse);
    if (r == 0 || run.result.mse < best.mse) best = std::move(run.result);
  }
  best.trace.inpaintings = total;
  return best;
}

MaskResult nonlocal_pixel_exchange(const GrayImage& f, const BinaryMask& mask,
                                   const NlpeConfig& cfg) {
  cfg.validate();
  require_proper_mask(f, mask);
  GrayImage u = inpaint(f, mask, cfg.solve).image;
  return exchange(f, mask, cfg, std::move(u), 1);
}

MaskResult nonlocal_pixel_exchange(const GrayImage& f, const BinaryMask& mask,
                                   const NlpeConfig& cfg, const GrayImage& initial) {
  cfg.validate();
  require_proper_mask(f, mask);
  require_same_extent(f.extent(), initial.extent(), "nonlocal_pixel_exchange (initial)");
  return exchange(f, mask, cfg, initial, 0);
}

MaskResult ps_nlpe(const GrayImage& f, const PsConfig& ps, const NlpeConfig& nlpe) {
  MaskResult sparse = probabilistic_sparsification(f, ps);
  MaskResult out = nonlocal_pixel_exchange(f, sparse.mask, nlpe, sparse.reconstruction);
  const std::size_t offset = sparse.trace.entries.size();
  for (auto& e : out.trace.entries) e.iteration += offset;
  std::vector<TraceEntry> merged = std::move(sparse.trace.entries);
  merged.insert(merged.end(), out.trace.entries.begin(), out.trace.entries.end());
  out.trace.entries = std::move(merged);
  out.trace.inpaintings += sparse.trace.inpaintings;
  return out;
}

void write_trace_csv(const OptimizationTrace& trace, std::ostream& out) {
  out << "iteration,density,mse,accepted,phase\n";
  for (const auto& e : trace.entries) {
    fmt::print(out, "{},{:.10f},{:.10f},{},{}\n", e.iteration, e.density, e.mse,
               e.accepted ? 1 : 0, e.phase == Phase::exchange ? "nlpe" : "ps");
  }
}

}  // namespace maskopt
