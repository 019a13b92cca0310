#include "maskopt/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

#include "maskopt/analytic_mask.hpp"
#include "maskopt/io.hpp"
#include "maskopt/metrics.hpp"
#include "maskopt/random.hpp"
#include "maskopt/sampling.hpp"

namespace maskopt {

namespace {

constexpr std::uint64_t kNlpeStream = 0x6e6c7065;  // "nlpe"

std::string density_label(double d) { return fmt::format("{}", d); }

BinaryMask random_mask(const GrayImage& f, double density, std::uint64_t seed) {
  std::vector<std::size_t> all(f.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  Rng rng(seed);
  BinaryMask mask(f.width(), f.height());
  for (std::size_t i :
       rng.sample(std::span<const std::size_t>(all), target_pixel_count(density, f.size()))) {
    mask.set(i, true);
  }
  return mask;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const char* field) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw FormatError(fmt::format("bench csv: bad {} '{}'", field, s));
}

std::uint64_t parse_u64(const std::string& s, const char* field) {
  const auto digit = [](unsigned char c) { return std::isdigit(c) != 0; };
  if (s.empty() || !std::all_of(s.begin(), s.end(), digit))
    throw FormatError(fmt::format("bench csv: bad {} '{}'", field, s));
  return std::stoull(s);
}

bool record_less(const BenchRecord& a, const BenchRecord& b) {
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  if (a.method != b.method) return method_name(a.method) < method_name(b.method);
  return a.density_target < b.density_target;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::belhachmi: return "belhachmi";
    case Method::ps: return "ps";
    case Method::ps_nlpe: return "ps_nlpe";
    case Method::learned: return "learned";
    case Method::random: return "random";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::belhachmi, Method::ps, Method::ps_nlpe, Method::learned, Method::random})
    if (method_name(m) == name) return m;
  throw std::invalid_argument(fmt::format("unknown method '{}'", name));
}

void BenchConfig::validate() const {
  if (densities.empty()) throw std::invalid_argument("no densities given");
  for (double d : densities) {
    if (!(d > 0.0 && d < 1.0)) {
      throw std::invalid_argument(fmt::format("densities must lie in (0,1), got {}", d));
    }
  }
  if (methods.empty()) throw std::invalid_argument("no methods given");
  if (std::find(methods.begin(), methods.end(), Method::learned) != methods.end() && !prob_dir) {
    throw std::invalid_argument("method 'learned' needs a probability mask directory");
  }
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  solve.validate();
  nlpe.validate();
}

std::vector<CorpusImage> load_corpus(const std::filesystem::path& dir,
                                     std::vector<std::string>& failures) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw IoError(fmt::format("cannot list corpus {}: {}", dir.string(), ec.message()));
  std::sort(files.begin(), files.end());

  std::vector<CorpusImage> out;
  for (const auto& p : files) {
    const std::string id = p.stem().string();
    if (id.find_first_of(",\"\n\r") != std::string::npos) {
      failures.push_back(fmt::format("{}: file name not usable as a csv field", p.string()));
      continue;
    }
    try {
      out.push_back({id, load_image(p)});
    } catch (const DataError& e) {
      failures.push_back(e.what());
      spdlog::warn("skipping {}: {}", p.string(), e.what());
    }
  }
  return out;
}

std::filesystem::path learned_mask_path(const std::filesystem::path& prob_dir,
                                        std::string_view image_id, double density) {
  return prob_dir / fmt::format("{}_d{}.pfm", image_id, density_label(density));
}

std::uint64_t cell_seed(std::uint64_t seed, std::string_view image_id, double density) {
  return derive_seed(derive_seed(seed, stable_hash(image_id)), stable_hash(density_label(density)));
}

namespace {

struct Built {
  BinaryMask mask;
  std::size_t inpaintings = 0;
  double wall_ms = 0.0;
};

BenchRecord new_record(const CorpusImage& img, Method method, double target,
                       const BenchConfig& cfg) {
  BenchRecord rec;
  rec.image_id = img.id;
  rec.method = method;
  rec.density_target = target;
  rec.seed = cell_seed(cfg.seed, img.id, target);
  return rec;
}

PsConfig ps_config(const BenchConfig& cfg, double target, std::uint64_t seed) {
  PsConfig ps = cfg.ps;
  ps.density = target;
  ps.seed = seed;
  ps.solve = cfg.solve;
  return ps;
}

NlpeConfig nlpe_config(const BenchConfig& cfg, std::uint64_t seed) {
  NlpeConfig nlpe = cfg.nlpe;
  nlpe.seed = derive_seed(seed, kNlpeStream);
  nlpe.solve = cfg.solve;
  return nlpe;
}

// Runs `build` under a fresh inpainting scope and a stopwatch.
template <typename Fn>
auto timed(Built& out, Fn&& build) {
  const auto start = std::chrono::steady_clock::now();
  InpaintingScope scope;
  auto result = build();
  out.inpaintings += scope.count();
  out.wall_ms +=
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

// Scoring solve, not part of mask construction.
BenchRecord score(BenchRecord rec, const GrayImage& f, const Built& built, const BenchConfig& cfg) {
  rec.inpaintings = built.inpaintings;
  rec.wall_ms = built.wall_ms;
  const Solution sol = inpaint(f, built.mask, cfg.solve);
  rec.density_actual = density(built.mask);
  rec.psnr_db = psnr(sol.image, f);

  if (cfg.dump_dir) {
    const std::string stem = fmt::format("{}_{}_d{}", rec.image_id, method_name(rec.method),
                                         density_label(rec.density_target));
    save_mask(built.mask, *cfg.dump_dir / (stem + "_mask.pgm"));
    save_image(sol.image, *cfg.dump_dir / (stem + "_inpaint.pgm"));
  }
  spdlog::info("{} {} d={} psnr={} inpaintings={}", rec.image_id, method_name(rec.method),
               rec.density_target, format_psnr(rec.psnr_db, 3), rec.inpaintings);
  return rec;
}

// PS and PS+NLPE from one sparsification; identical to two run_cell calls
// since both start from the same cell seed.
std::vector<BenchRecord> run_ps_pair(const CorpusImage& img, double target,
                                     const BenchConfig& cfg) {
  const GrayImage& f = img.image;
  BenchRecord ps_rec = new_record(img, Method::ps, target, cfg);
  Built built;
  const PsConfig ps = ps_config(cfg, target, ps_rec.seed);
  MaskResult sparse = timed(built, [&] { return probabilistic_sparsification(f, ps); });
  built.mask = sparse.mask;
  std::vector<BenchRecord> out;
  out.push_back(score(ps_rec, f, built, cfg));

  const NlpeConfig nlpe = nlpe_config(cfg, ps_rec.seed);
  built.mask = timed(built, [&] {
    return nonlocal_pixel_exchange(f, sparse.mask, nlpe, sparse.reconstruction).mask;
  });
  out.push_back(score(new_record(img, Method::ps_nlpe, target, cfg), f, built, cfg));
  return out;
}

}  // namespace

BenchRecord run_cell(const CorpusImage& img, Method method, double target,
                     const BenchConfig& cfg) {
  const GrayImage& f = img.image;
  BenchRecord rec = new_record(img, method, target, cfg);
  Built built;
  built.mask = timed(built, [&] {
    switch (method) {
      case Method::belhachmi: return mask_belhachmi(f, target);
      case Method::random: return random_mask(f, target, rec.seed);
      case Method::ps:
        return probabilistic_sparsification(f, ps_config(cfg, target, rec.seed)).mask;
      case Method::ps_nlpe:
        return ps_nlpe(f, ps_config(cfg, target, rec.seed), nlpe_config(cfg, rec.seed)).mask;
      case Method::learned: {
        const ProbMask c = load_prob_mask(learned_mask_path(*cfg.prob_dir, img.id, target));
        return best_of(c, f, cfg.samples, rec.seed, cfg.solve).mask;
      }
    }
    throw std::logic_error("unhandled method");
  });
  return score(rec, f, built, cfg);
}

BenchResult run_benchmark(const std::vector<CorpusImage>& corpus, const BenchConfig& cfg) {
  cfg.validate();
  if (cfg.dump_dir) std::filesystem::create_directories(*cfg.dump_dir);

  auto wants = [&](Method m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
  };
  const bool paired = wants(Method::ps) && wants(Method::ps_nlpe);

  struct Cell {
    const CorpusImage* image;
    Method method;
    double density;
  };
  std::vector<Cell> cells;
  for (const auto& img : corpus)
    for (Method m : cfg.methods)
      if (!(paired && m == Method::ps_nlpe))
        for (double d : cfg.densities) cells.push_back({&img, m, d});

  std::vector<std::vector<BenchRecord>> slots(cells.size());
  std::vector<std::string> failures;
  std::mutex failures_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
      const Cell& c = cells[i];
      try {
        if (paired && c.method == Method::ps) {
          slots[i] = run_ps_pair(*c.image, c.density, cfg);
        } else {
          slots[i] = {run_cell(*c.image, c.method, c.density, cfg)};
        }
      } catch (const std::exception& e) {
        const std::string msg = fmt::format("{} {} d={}: {}", c.image->id, method_name(c.method),
                                            c.density, e.what());
        spdlog::warn("skipping cell {}", msg);
        std::lock_guard lock(failures_mutex);
        failures.push_back(msg);
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  BenchResult out;
  for (auto& s : slots)
    for (auto& r : s) out.records.push_back(std::move(r));
  std::sort(out.records.begin(), out.records.end(), record_less);
  std::sort(failures.begin(), failures.end());
  out.failures = std::move(failures);
  return out;
}

void write_bench_csv(const std::vector<BenchRecord>& records, std::ostream& out) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : records) {
    fmt::print(out, "{},{},{},{},{},{},{:.3f},{}\n", r.image_id, method_name(r.method),
               r.density_target, r.density_actual, format_psnr(r.psnr_db), r.inpaintings,
               r.wall_ms, r.seed);
  }
}

std::vector<BenchRecord> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kBenchCsvHeader) {
    throw FormatError("bench csv: unexpected header");
  }
  std::vector<BenchRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw FormatError(fmt::format("bench csv: expected 8 fields in '{}'", line));
    BenchRecord r;
    r.image_id = f[0];
    try {
      r.method = parse_method(f[1]);
    } catch (const std::invalid_argument& e) {
      throw FormatError(fmt::format("bench csv: {}", e.what()));
    }
    r.density_target = parse_double(f[2], "density_target");
    r.density_actual = parse_double(f[3], "density_actual");
    r.psnr_db = parse_double(f[4], "psnr_db");
    r.inpaintings = parse_u64(f[5], "inpaintings");
    r.wall_ms = parse_double(f[6], "wall_ms");
    r.seed = parse_u64(f[7], "seed");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<BenchAverage> average_by_density(const std::vector<BenchRecord>& records) {
  std::map<std::pair<std::string_view, double>, BenchAverage> acc;
  for (const auto& r : records) {
    auto& a = acc[{method_name(r.method), r.density_target}];
    a.method = r.method;
    a.density_target = r.density_target;
    ++a.images;
    a.psnr_db += r.psnr_db;
    a.inpaintings += static_cast<double>(r.inpaintings);
    a.density_actual += r.density_actual;
  }
  std::vector<BenchAverage> out;
  for (auto& [key, a] : acc) {
    const double n = static_cast<double>(a.images);
    a.psnr_db /= n;
    a.inpaintings /= n;
    a.density_actual /= n;
    out.push_back(a);
  }
  return out;
}

void write_averages_tsv(const std::vector<BenchAverage>& avgs, std::ostream& out) {
  out << "method\tdensity_target\timages\tmean_psnr_db\tmean_inpaintings\tmean_density_actual\n";
  for (const auto& a : avgs) {
    fmt::print(out, "{}\t{}\t{}\t{}\t{:.3f}\t{:.6f}\n", method_name(a.method), a.density_target,
               a.images, format_psnr(a.psnr_db), a.inpaintings, a.density_actual);
  }
}

void write_plot_tsv(const std::vector<BenchAverage>& avgs, std::ostream& out) {
  std::vector<Method> methods;
  std::vector<double> densities;
  for (const auto& a : avgs) {
    if (std::find(methods.begin(), methods.end(), a.method) == methods.end())
      methods.push_back(a.method);
    if (std::find(densities.begin(), densities.end(), a.density_target) == densities.end())
      densities.push_back(a.density_target);
  }
  std::sort(densities.begin(), densities.end());
  auto find = [&](Method m, double d) -> const BenchAverage* {
    for (const auto& a : avgs)
      if (a.method == m && a.density_target == d) return &a;
    return nullptr;
  };

  out << "density";
  for (Method m : methods) out << '\t' << method_name(m) << "_psnr_db";
  for (Method m : methods) out << '\t' << method_name(m) << "_inpaintings";
  out << '\n';
  for (double d : densities) {
    fmt::print(out, "{}", d);
    for (Method m : methods) {
      const auto* a = find(m, d);
      out << '\t' << (a ? format_psnr(a->psnr_db) : "nan");
    }
    for (Method m : methods) {
      const auto* a = find(m, d);
      out << '\t' << (a ? fmt::format("{:.3f}", a->inpaintings) : "nan");
    }
    out << '\n';
  }
}

}  // namespace maskopt
