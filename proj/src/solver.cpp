#include "maskopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "maskopt/laplace.hpp"

namespace maskopt {

namespace {

thread_local InpaintingScope* current_scope = nullptr;
std::atomic<std::size_t> global_inpaintings{0};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void clamp_to_known_range(GrayImage& u, const GrayImage& f, const BinaryMask& mask) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (mask[i]) {
      lo = std::min(lo, f[i]);
      hi = std::max(hi, f[i]);
    }
  }
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::clamp(u[i], lo, hi);
}

// MIC(0) of the reduced Laplacian: L ~ (D + E) D^-1 (D + E^T), E its strict
// lower part. Dropped fill is folded into the diagonal (relaxed by kRelax).
class ModifiedIncompleteCholesky {
 public:
  explicit ModifiedIncompleteCholesky(const ReducedSystem& sys) {
    const std::size_t n = sys.unknown_count();
    const auto diag = sys.diagonal();
    lower_.assign(n, {kNone, kNone});
    upper_.assign(n, {kNone, kNone});
    for (std::size_t k = 0; k < n; ++k) {
      int lo = 0, hi = 0;
      for (std::uint32_t s : sys.neighbours(k)) {
        if (s < k) lower_[k][lo++] = s;
        else if (s < n) upper_[k][hi++] = s;
      }
    }
    auto upper_count = [&](std::uint32_t j) {
      return (upper_[j][0] != kNone ? 1.0 : 0.0) + (upper_[j][1] != kNone ? 1.0 : 0.0);
    };
    inv_d_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      double v = diag[k];
      for (std::uint32_t j : lower_[k])
        if (j != kNone) v -= (1.0 + kRelax * (upper_count(j) - 1.0)) * inv_d_[j];
      inv_d_[k] = 1.0 / (v > 1e-3 * diag[k] ? v : diag[k]);
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    const std::size_t n = inv_d_.size();
    auto get = [&](std::uint32_t s) { return s == kNone ? 0.0 : z[s]; };
    for (std::size_t k = 0; k < n; ++k) {
      z[k] = (r[k] + get(lower_[k][0]) + get(lower_[k][1])) * inv_d_[k];
    }
    for (std::size_t k = n; k-- > 0;) {
      z[k] += (get(upper_[k][0]) + get(upper_[k][1])) * inv_d_[k];
    }
  }

 private:
  static constexpr double kRelax = 0.97;
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::array<std::uint32_t, 2>> lower_, upper_;
  std::vector<double> inv_d_;
};

Solution solve_cg(const GrayImage& f, const BinaryMask& mask, const SolveConfig& cfg,
                  const GrayImage* guess) {
  cfg.validate();
  require_same_extent(f.extent(), mask.extent(), "inpaint (image, mask)");
  if (guess) require_same_extent(f.extent(), guess->extent(), "inpaint (image, guess)");
  if (mask.count() == 0) throw NoKnownDataError();

  record_inpainting();
  Solution out{f, {}};
  out.stats.counted_as_inpainting = true;

  const ReducedSystem sys(f, mask);
  const std::size_t n = sys.unknown_count();
  if (n == 0) {
    if (cfg.observer) cfg.observer(f, mask, out.image);
    return out;
  }

  const auto pixels = sys.unknown_pixels();
  std::vector<double> x(n, 0.0);
  if (guess) {
    for (std::size_t k = 0; k < n; ++k) x[k] = (*guess)[pixels[k]];
  }

  const auto b = sys.rhs();
  std::vector<double> r(n), z(n), p(n), ap(n);
  sys.apply(x, ap);
  for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];

  const double bnorm = std::sqrt(dot(b, b));
  const std::size_t max_iter = cfg.resolved_max_iter(f.size());
  double rnorm = std::sqrt(dot(r, r));

  if (bnorm == 0.0) {
    // Every known neighbour is zero: the unique solution is zero.
    std::fill(x.begin(), x.end(), 0.0);
    rnorm = 0.0;
  } else {
    const double target = cfg.tol * bnorm;
    std::optional<ModifiedIncompleteCholesky> mic;
    if (!cfg.preconditioner && cfg.preconditioning == Preconditioning::modified_incomplete_cholesky)
      mic.emplace(sys);
    auto precondition = [&](std::span<const double> in, std::span<double> res) {
      if (cfg.preconditioner) {
        cfg.preconditioner(sys, in, res);
      } else if (mic) {
        mic->apply(in, res);
      } else {
        std::copy(in.begin(), in.end(), res.begin());
      }
    };
    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    std::size_t it = 0;
    while (rnorm > target && it < max_iter) {
      sys.apply(p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      for (std::size_t k = 0; k < n; ++k) {
        x[k] += alpha * p[k];
        r[k] -= alpha * ap[k];
      }
      rnorm = std::sqrt(dot(r, r));
      ++it;
      if (rnorm <= target) break;
      precondition(r, z);
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    out.stats.iterations = it;
    out.stats.hit_max_iter = rnorm > target;
    if (out.stats.hit_max_iter) {
      spdlog::warn("inpaint: CG stopped after {} iterations at relative residual {:.3e}", it,
                   rnorm / bnorm);
    }
  }
  out.stats.final_relative_residual = bnorm == 0.0 ? 0.0 : rnorm / bnorm;

  for (std::size_t k = 0; k < n; ++k) out.image[pixels[k]] = x[k];
  clamp_to_known_range(out.image, f, mask);
  if (cfg.observer) cfg.observer(f, mask, out.image);
  return out;
}

}  // namespace

void SolveConfig::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw std::invalid_argument(fmt::format("solver tolerance must be positive, got {}", tol));
  }
}

ReducedSystem::ReducedSystem(const GrayImage& f, const BinaryMask& mask) {
  require_same_extent(f.extent(), mask.extent(), "ReducedSystem");
  const Extent& e = f.extent();
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> slot(e.size(), kNone);
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!mask[i]) {
      slot[i] = static_cast<std::uint32_t>(pixel_.size());
      pixel_.push_back(static_cast<std::uint32_t>(i));
    }
  }
  const auto n = static_cast<std::uint32_t>(pixel_.size());
  nbr_.resize(n);
  diag_.resize(n);
  rhs_.assign(n, 0.0);
  for (std::uint32_t k = 0; k < n; ++k) {
    const std::size_t i = pixel_[k];
    const std::size_t x = i % e.width;
    const std::size_t y = i / e.width;
    std::array<std::uint32_t, 4> nb{n, n, n, n};
    int count = 0;
    int used = 0;
    auto visit = [&](std::size_t j) {
      ++count;
      if (mask[j]) {
        rhs_[k] += f[j];
      } else {
        nb[used++] = slot[j];
      }
    };
    if (x > 0) visit(i - 1);
    if (x + 1 < e.width) visit(i + 1);
    if (y > 0) visit(i - e.width);
    if (y + 1 < e.height) visit(i + e.width);
    nbr_[k] = nb;
    diag_[k] = count;
  }
}

void ReducedSystem::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = pixel_.size();
  auto at = [&](std::uint32_t s) { return s < n ? x[s] : 0.0; };
  for (std::size_t k = 0; k < n; ++k) {
    const auto& nb = nbr_[k];
    y[k] = diag_[k] * x[k] - (at(nb[0]) + at(nb[1]) + at(nb[2]) + at(nb[3]));
  }
}

Solution inpaint(const GrayImage& f, const BinaryMask& mask, const SolveConfig& cfg) {
  return solve_cg(f, mask, cfg, nullptr);
}

Solution inpaint(const GrayImage& f, const BinaryMask& mask, const SolveConfig& cfg,
                 const GrayImage& initial_guess) {
  return solve_cg(f, mask, cfg, &initial_guess);
}

Solution inpaint_jacobi(const GrayImage& f, const ProbMask& c, const SolveConfig& cfg,
                        double damping) {
  cfg.validate();
  require_same_extent(f.extent(), c.extent(), "inpaint_jacobi (image, confidence)");
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw std::invalid_argument(fmt::format("damping must lie in (0,1], got {}", damping));
  }
  if (std::none_of(c.values().begin(), c.values().end(), [](double v) { return v > 0.0; })) {
    throw NoKnownDataError();
  }
  record_inpainting();

  const Extent& e = f.extent();
  double f2 = 0.0;
  for (double v : f.values()) f2 += v * v;
  f2 /= static_cast<double>(f.size());
  const double threshold = cfg.tol * cfg.tol * f2;
  const std::size_t max_iter = cfg.resolved_max_iter(f.size());

  Solution out{f, {}};
  out.stats.counted_as_inpainting = true;
  GrayImage& u = out.image;
  GrayImage next = u;
  double loss = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (it < max_iter) {
    for (std::size_t y = 0; y < e.height; ++y) {
      for (std::size_t x = 0; x < e.width; ++x) {
        const std::size_t i = e.index(x, y);
        double sum = 0.0;
        int deg = 0;
        if (x > 0) sum += u[i - 1], ++deg;
        if (x + 1 < e.width) sum += u[i + 1], ++deg;
        if (y > 0) sum += u[i - e.width], ++deg;
        if (y + 1 < e.height) sum += u[i + e.width], ++deg;
        const double ci = c[i];
        const double fixed = ((1.0 - ci) * sum + ci * f[i]) / ((1.0 - ci) * deg + ci);
        next[i] = (ci == 1.0) ? f[i] : (1.0 - damping) * u[i] + damping * fixed;
      }
    }
    std::swap(u, next);
    ++it;
    loss = residual_loss(u, f, c);
    if (loss <= threshold) break;
  }
  out.stats.iterations = it;
  out.stats.final_relative_residual = f2 > 0.0 ? std::sqrt(loss / f2) : std::sqrt(loss);
  out.stats.hit_max_iter = loss > threshold;
  if (out.stats.hit_max_iter) {
    spdlog::warn("inpaint_jacobi: stopped after {} sweeps, residual loss {:.3e}", it, loss);
  }
  return out;
}

InpaintingScope::InpaintingScope() : parent_(current_scope) { current_scope = this; }

InpaintingScope::~InpaintingScope() { current_scope = parent_; }

void record_inpainting() {
  global_inpaintings.fetch_add(1, std::memory_order_relaxed);
  for (InpaintingScope* s = current_scope; s != nullptr; s = s->parent_) {
    s->count_.fetch_add(1, std::memory_order_relaxed);
  }
}

std::size_t inpainting_counter() { return current_scope ? current_scope->count() : 0; }

std::size_t total_inpaintings() { return global_inpaintings.load(std::memory_order_relaxed); }

}  // namespace maskopt
