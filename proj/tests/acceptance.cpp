// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "maskopt/analytic_mask.hpp"
#include "maskopt/bench.hpp"
#include "maskopt/io.hpp"
#include "maskopt/metrics.hpp"
#include "maskopt/solver.hpp"
#include "maskopt/stochastic_mask.hpp"
#include "support.hpp"

using namespace maskopt;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Checks every observed CG solve against the known-value bounds.
struct BoundsWatch {
  std::size_t solves = 0;
  std::size_t violations = 0;
  double worst = 0.0;

  SolveObserver observer() {
    return [this](const GrayImage& f, const BinaryMask& mask, const GrayImage& u) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (mask[i]) {
          lo = std::min(lo, f[i]);
          hi = std::max(hi, f[i]);
        }
      }
      bool bad = false;
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double excess = std::max(lo - u[i], u[i] - hi);
        if (excess > 1e-9) {
          bad = true;
          worst = std::max(worst, excess);
        }
      }
      ++solves;
      violations += bad;
    };
  }
};

BoundsWatch watch;

SolveConfig watched(SolveConfig cfg = {}) {
  cfg.observer = watch.observer();
  return cfg;
}

Outcome midpoint() {
  const GrayImage f(3, 1, std::vector<double>{0.0, 7.0, 100.0});
  const BinaryMask mask(3, 1, {1, 0, 1});
  const auto t0 = Clock::now();
  const Solution s = inpaint(f, mask, watched());
  const double ms = elapsed_ms(t0);
  const double err = std::abs(s.image[1] - 50.0);
  return {err <= 1e-8 && ms < 1.0, fmt::format("u[1]={:.12f} err={:.2e} time={:.3f}ms", s.image[1], err, ms)};
}

Outcome constant_solution() {
  GrayImage f(64, 64, 0.0);
  BinaryMask mask(64, 64);
  f.at(17, 40) = 87.0;
  mask.set(f.extent().index(17, 40), true);
  const auto t0 = Clock::now();
  const Solution s = inpaint(f, mask, watched());
  const double ms = elapsed_ms(t0);
  double worst = 0.0;
  for (double v : s.image.values()) worst = std::max(worst, std::abs(v - 87.0));
  return {worst < 1e-4 && ms < 1000.0, fmt::format("max|u-87|={:.2e} time={:.1f}ms", worst, ms)};
}

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  SolveConfig jacobi_cfg;
  jacobi_cfg.tol = 1e-9;
  jacobi_cfg.max_iter = 2'000'000;
  bool converged = true;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const GrayImage f = testing::random_image(32, 32, 1000 + k);
    const BinaryMask mask = testing::random_mask(32, 32, 0.10, 2000 + k);
    const Solution cg = inpaint(f, mask, watched());
    const Solution jac = inpaint_jacobi(f, ProbMask::from_binary(mask), jacobi_cfg);
    converged = converged && !cg.stats.hit_max_iter && !jac.stats.hit_max_iter;
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(cg.image[i] - jac.image[i]));
  }
  const double ms = elapsed_ms(t0);
  return {worst <= 1e-3 && converged && ms < 30000.0,
          fmt::format("max-abs={:.2e} converged={} time={:.1f}s", worst, converged, ms / 1000)};
}

Outcome belhachmi_density() {
  double worst = 0.0;
  std::size_t inpaintings = 0;
  std::size_t masks = 0;
  for (std::uint64_t k = 0; k < 6; ++k) {
    const GrayImage f = testing::synthetic_image(128, 128, 300 + k);
    for (double d : {0.01, 0.03, 0.05, 0.10}) {
      InpaintingScope scope;
      const BinaryMask m = mask_belhachmi(f, d);
      inpaintings += scope.count();
      worst = std::max(worst, std::abs(density(m) - d));
      ++masks;
    }
  }
  return {worst <= 0.005 && inpaintings == 0,
          fmt::format("{} masks, max|density-d|={:.5f}, inpaintings={}", masks, worst, inpaintings)};
}

std::vector<CorpusImage> ordering_corpus() {
  std::vector<CorpusImage> corpus;
  for (std::uint64_t k = 0; k < 5; ++k) {
    corpus.push_back({fmt::format("synth{}", k), testing::synthetic_image(128, 128, 500 + k)});
  }
  return corpus;
}

BenchConfig full_bench_config(const std::filesystem::path& prob_dir) {
  BenchConfig cfg;
  cfg.densities = {0.01, 0.02, 0.03, 0.05, 0.08, 0.10};
  cfg.methods = {Method::belhachmi, Method::ps, Method::ps_nlpe, Method::learned, Method::random};
  cfg.seed = 20240917;
  cfg.ps.runs = 5;
  cfg.nlpe.cycles = 10;
  cfg.solve = watched();
  cfg.prob_dir = prob_dir;
  cfg.samples = 30;
  return cfg;
}

// Stand-in probability masks for the learned column: the analytic field.
void write_prob_masks(const std::vector<CorpusImage>& corpus, const BenchConfig& cfg) {
  for (const auto& img : corpus) {
    for (double d : cfg.densities) {
      const DitherField field = belhachmi_field(img.image, d);
      save_prob_mask(ProbMask(img.image.width(), img.image.height(), field.values),
                     learned_mask_path(*cfg.prob_dir, img.id, d));
    }
  }
}

std::string csv_text(const BenchResult& res) {
  std::ostringstream out;
  write_bench_csv(res.records, out);
  return out.str();
}

// Drops the wall_ms column (7th field) from every line.
std::string without_wall_ms(const std::string& csv) {
  std::istringstream in(csv);
  std::string result;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    if (fields.size() > 6) fields.erase(fields.begin() + 6);
    for (std::size_t i = 0; i < fields.size(); ++i) result += (i ? "," : "") + fields[i];
    result += '\n';
  }
  return result;
}

BenchResult first_run;
double first_run_s = 0.0;

Outcome quality_ordering(const std::vector<CorpusImage>& corpus, const BenchConfig& cfg) {
  const auto t0 = Clock::now();
  first_run = run_benchmark(corpus, cfg);
  first_run_s = elapsed_ms(t0) / 1000.0;

  std::map<Method, std::vector<double>> psnrs;
  for (const auto& r : first_run.records) psnrs[r.method].push_back(r.psnr_db);
  auto mean = [&](Method m) {
    const auto& v = psnrs[m];
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(v.size());
  };
  const double nl = mean(Method::ps_nlpe), ps = mean(Method::ps), bel = mean(Method::belhachmi),
               rnd = mean(Method::random), learned = mean(Method::learned);
  const std::size_t cells = corpus.size() * cfg.densities.size();
  const bool complete = first_run.failures.empty() && psnrs[Method::ps_nlpe].size() == cells &&
                        psnrs[Method::ps].size() == cells && psnrs[Method::belhachmi].size() == cells &&
                        psnrs[Method::random].size() == cells;
  const bool ordered = nl >= ps && ps >= bel && bel >= rnd;
  return {complete && ordered && first_run_s <= 1800.0,
          fmt::format("mean PSNR ps_nlpe={:.3f} ps={:.3f} belhachmi={:.3f} random={:.3f} "
                      "(learned stand-in {:.3f}) time={:.1f}s",
                      nl, ps, bel, rnd, learned, first_run_s)};
}

Outcome determinism(const std::vector<CorpusImage>& corpus, const BenchConfig& cfg) {
  const BenchResult second = run_benchmark(corpus, cfg);
  const std::string a = without_wall_ms(csv_text(first_run));
  const std::string b = without_wall_ms(csv_text(second));
  return {a == b && !first_run.records.empty(),
          fmt::format("{} rows, {} bytes compared, identical={}", second.records.size(), a.size(), a == b)};
}

std::vector<OptimizationTrace> traces;

Outcome nlpe_count() {
  const GrayImage f = testing::synthetic_image(256, 256, 700);
  PsConfig ps;
  ps.density = 0.03;
  ps.runs = 1;
  ps.seed = 7;
  ps.solve = watched();
  const MaskResult sparse = probabilistic_sparsification(f, ps);
  NlpeConfig cfg;
  cfg.swap = 10;
  cfg.cycles = 10;
  cfg.seed = 8;
  cfg.solve = watched();
  InpaintingScope scope;
  const MaskResult r = nonlocal_pixel_exchange(f, sparse.mask, cfg);
  traces.push_back(r.trace);
  const std::size_t n = scope.count();
  return {n >= 1600 && n <= 2400 && n == r.trace.inpaintings,
          fmt::format("mask pixels={} inpaintings={} psnr {:.3f} -> {:.3f}", sparse.mask.count(), n,
                      psnr_from_mse(sparse.mse), psnr_from_mse(r.mse))};
}

Outcome nlpe_monotonicity() {
  for (std::uint64_t k = 0; k < 4; ++k) {
    const GrayImage f = testing::synthetic_image(64, 64, 800 + k);
    PsConfig ps;
    ps.density = 0.02 + 0.02 * static_cast<double>(k);
    ps.runs = 2;
    ps.seed = k;
    ps.solve = watched();
    NlpeConfig nl;
    nl.seed = 100 + k;
    nl.solve = watched();
    traces.push_back(ps_nlpe(f, ps, nl).trace);
  }
  std::size_t checked = 0, accepted = 0;
  for (const auto& t : traces) {
    double state = std::numeric_limits<double>::infinity();
    bool first = true;
    for (const auto& e : t.entries) {
      if (e.phase != Phase::exchange || !e.accepted) continue;
      if (!first && e.mse > state) {
        return {false, fmt::format("accepted mse rose from {} to {}", state, e.mse)};
      }
      state = e.mse;
      first = false;
      ++accepted;
    }
    ++checked;
  }
  return {accepted > 0, fmt::format("{} traces, {} accepted exchanges, non-increasing", checked, accepted)};
}

Outcome maximum_principle() {
  return {watch.solves > 0 && watch.violations == 0,
          fmt::format("{} solves observed, {} outside known range (worst excess {:.2e})", watch.solves,
                      watch.violations, watch.worst)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  int failed = 0;
  auto report = [&](const char* name, Outcome o) {
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };
  auto guarded = [](const std::function<Outcome()>& fn) -> Outcome {
    try {
      return fn();
    } catch (const std::exception& e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };

  testing::TempDir probs("acceptance_prob");
  const auto corpus = ordering_corpus();
  const BenchConfig cfg = full_bench_config(probs.path);
  write_prob_masks(corpus, cfg);

  report("harmonic_midpoint", guarded(midpoint));
  report("constant_solution", guarded(constant_solution));
  report("solver_oracle_equivalence", guarded(oracle_equivalence));
  report("belhachmi_density_targeting", guarded(belhachmi_density));
  report("quality_ordering", guarded([&] { return quality_ordering(corpus, cfg); }));
  report("nlpe_inpainting_count", guarded(nlpe_count));
  report("nlpe_monotonicity", guarded(nlpe_monotonicity));
  report("determinism", guarded([&] { return determinism(corpus, cfg); }));
  report("maximum_principle", guarded(maximum_principle));

  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
