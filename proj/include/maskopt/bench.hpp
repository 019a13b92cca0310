#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maskopt/image.hpp"
#include "maskopt/solver.hpp"
#include "maskopt/stochastic_mask.hpp"

namespace maskopt {

enum class Method { belhachmi, ps, ps_nlpe, learned, random };

std::string_view method_name(Method m);
// Throws std::invalid_argument for unknown names.
Method parse_method(std::string_view name);

struct BenchRecord {
  std::string image_id;
  Method method = Method::belhachmi;
  double density_target = 0.0;
  double density_actual = 0.0;
  double psnr_db = 0.0;          // +inf for a perfect reconstruction
  std::size_t inpaintings = 0;   // spent building the mask
  double wall_ms = 0.0;          // mask construction time
  std::uint64_t seed = 0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct CorpusImage {
  std::string id;  // file stem
  GrayImage image;
};

struct BenchConfig {
  std::vector<double> densities;
  std::vector<Method> methods;
  std::uint64_t seed = 0;
  PsConfig ps;      // density and seed are set per cell
  NlpeConfig nlpe;  // seed is set per cell
  SolveConfig solve;
  // Learned masks: <prob_dir>/<image id>_d<density>.pfm, see learned_mask_path().
  std::optional<std::filesystem::path> prob_dir;
  std::size_t samples = 30;
  std::optional<std::filesystem::path> dump_dir;
  std::size_t jobs = 1;

  void validate() const;
};

struct BenchResult {
  std::vector<BenchRecord> records;   // sorted by (image, method, density)
  std::vector<std::string> failures;  // one line per skipped image or cell
};

// Loads every *.pgm in `dir` (sorted by name). Unreadable files land in
// `failures` instead of throwing.
std::vector<CorpusImage> load_corpus(const std::filesystem::path& dir,
                                     std::vector<std::string>& failures);

std::filesystem::path learned_mask_path(const std::filesystem::path& prob_dir,
                                        std::string_view image_id, double density);

// Seed shared by every method on one (image, density) cell, so ps and
// ps_nlpe start from the same sparsified mask.
std::uint64_t cell_seed(std::uint64_t seed, std::string_view image_id, double density);

BenchResult run_benchmark(const std::vector<CorpusImage>& corpus, const BenchConfig& cfg);

// Builds one mask and scores it; the unit of work behind run_benchmark.
BenchRecord run_cell(const CorpusImage& img, Method method, double target,
                     const BenchConfig& cfg);

inline constexpr std::string_view kBenchCsvHeader =
    "image,method,density_target,density_actual,psnr_db,inpaintings,wall_ms,seed";

void write_bench_csv(const std::vector<BenchRecord>& records, std::ostream& out);
// Throws FormatError on a bad header or row.
std::vector<BenchRecord> read_bench_csv(std::istream& in);

struct BenchAverage {
  Method method = Method::belhachmi;
  double density_target = 0.0;
  std::size_t images = 0;
  double psnr_db = 0.0;
  double inpaintings = 0.0;
  double density_actual = 0.0;
};

// Means over images per (method, density), ordered by method then density.
std::vector<BenchAverage> average_by_density(const std::vector<BenchRecord>& records);

// Long-form table of the averages.
void write_averages_tsv(const std::vector<BenchAverage>& avgs, std::ostream& out);
// Wide table, one row per density, with "<method>_psnr_db" columns followed
// by "<method>_inpaintings" columns.
void write_plot_tsv(const std::vector<BenchAverage>& avgs, std::ostream& out);

}  // namespace maskopt
