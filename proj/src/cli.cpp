#include "maskopt/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "maskopt/analytic_mask.hpp"
#include "maskopt/bench.hpp"
#include "maskopt/io.hpp"
#include "maskopt/metrics.hpp"
#include "maskopt/sampling.hpp"
#include "maskopt/solver.hpp"
#include "maskopt/stochastic_mask.hpp"

namespace maskopt {

namespace {

CLI::Validator density_range(bool allow_one) {
  return CLI::Validator(
      [allow_one](std::string& s) -> std::string {
        double v = 0.0;
        try {
          v = std::stod(s);
        } catch (const std::exception&) {
          return "not a number: " + s;
        }
        const bool ok = v > 0.0 && (allow_one ? v <= 1.0 : v < 1.0);
        if (!ok) return fmt::format("density {} outside {}", s, allow_one ? "(0,1]" : "(0,1)");
        return {};
      },
      allow_one ? "DENSITY in (0,1]" : "DENSITY in (0,1)");
}

void install_logger(bool verbose) {
  auto logger = std::make_shared<spdlog::logger>(
      "maskopt", std::make_shared<spdlog::sinks::stderr_sink_mt>());
  logger->set_pattern("[%l] %v");
  logger->set_level(verbose ? spdlog::level::debug : spdlog::level::warn);
  spdlog::set_default_logger(logger);
}

void write_trace(const OptimizationTrace& trace, const std::string& path) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw IoError(fmt::format("cannot open {} for writing", path));
  write_trace_csv(trace, f);
}

std::ofstream open_output(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw IoError(fmt::format("cannot open {} for writing", p.string()));
  return f;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse-mask homogeneous diffusion inpainting toolkit", "maskopt"};
  app.fallthrough();
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging on stderr");

  SolveConfig solve;
  auto add_solver_opts = [&solve](CLI::App* cmd) {
    cmd->add_option("--tol", solve.tol, "CG relative residual tolerance")->capture_default_str();
    cmd->add_option("--max-iter", solve.max_iter, "CG iteration cap (0 = 10 x pixels)");
    const std::map<std::string, Preconditioning> kinds{
        {"mic", Preconditioning::modified_incomplete_cholesky}, {"none", Preconditioning::none}};
    cmd->add_option("--precond", solve.preconditioning, "CG preconditioner")
        ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case))
        ->default_str("mic");
  };

  // inpaint
  std::string image_path, mask_path, out_path;
  auto* cmd_inpaint = app.add_subcommand("inpaint", "Inpaint an image from a binary mask");
  cmd_inpaint->add_option("--image", image_path, "Original image (P5 PGM)")->required();
  cmd_inpaint->add_option("--mask", mask_path, "Binary mask (P5 PGM, 255 = known)")->required();
  cmd_inpaint->add_option("--out", out_path, "Reconstruction (P5 PGM)");
  add_solver_opts(cmd_inpaint);

  // mask ...
  auto* cmd_mask = app.add_subcommand("mask", "Build an inpainting mask");
  cmd_mask->require_subcommand(1);
  double density_target = 0.05;
  std::uint64_t seed = 0;
  std::string trace_path, recon_path;

  auto* cmd_bel = cmd_mask->add_subcommand("belhachmi", "Dithered Laplacian magnitude");
  cmd_bel->add_option("--image", image_path)->required();
  cmd_bel->add_option("--density", density_target)->required()->check(density_range(true));
  cmd_bel->add_option("--out", out_path, "Mask (P5 PGM)")->required();

  PsConfig ps;
  auto* cmd_ps = cmd_mask->add_subcommand("ps", "Probabilistic sparsification");
  cmd_ps->add_option("--image", image_path)->required();
  cmd_ps->add_option("--density", density_target)->required()->check(density_range(false));
  cmd_ps->add_option("--p", ps.p, "Candidate fraction")->capture_default_str();
  cmd_ps->add_option("--q", ps.q, "Fraction of candidates selected by --update")
      ->capture_default_str();
  const std::map<std::string, PsUpdate> updates{
      {"keep-lowest", PsUpdate::keep_lowest_error},
      {"restore-highest", PsUpdate::restore_highest_error}};
  cmd_ps->add_option("--update", ps.update,
                     "keep-lowest: q-fraction stays removed; restore-highest: q-fraction goes back")
      ->transform(CLI::CheckedTransformer(updates, CLI::ignore_case))
      ->default_str("keep-lowest");
  cmd_ps->add_option("--runs", ps.runs, "Independent runs, best kept")->capture_default_str();
  cmd_ps->add_option("--seed", seed);
  cmd_ps->add_option("--out", out_path, "Mask (P5 PGM)")->required();
  cmd_ps->add_option("--trace", trace_path, "Trace CSV");
  cmd_ps->add_option("--reconstruction", recon_path, "Inpainting of the final mask");
  add_solver_opts(cmd_ps);

  NlpeConfig nlpe;
  auto* cmd_nlpe = cmd_mask->add_subcommand("nlpe", "Nonlocal pixel exchange on an existing mask");
  cmd_nlpe->add_option("--image", image_path)->required();
  cmd_nlpe->add_option("--mask", mask_path, "Starting mask")->required();
  cmd_nlpe->add_option("--candidates", nlpe.candidates)->capture_default_str();
  cmd_nlpe->add_option("--swap", nlpe.swap)->capture_default_str();
  cmd_nlpe->add_option("--cycles", nlpe.cycles)->capture_default_str();
  cmd_nlpe->add_option("--seed", seed);
  cmd_nlpe->add_option("--out", out_path, "Mask (P5 PGM)")->required();
  cmd_nlpe->add_option("--trace", trace_path, "Trace CSV");
  cmd_nlpe->add_option("--reconstruction", recon_path, "Inpainting of the final mask");
  add_solver_opts(cmd_nlpe);

  std::string prob_path;
  std::size_t samples = 30;
  auto* cmd_sample = cmd_mask->add_subcommand("sample", "Binarise a probability mask");
  cmd_sample->add_option("--prob", prob_path, "Probability mask (PFM)")->required();
  cmd_sample->add_option("--image", image_path, "Original; enables best-of-N selection");
  cmd_sample->add_option("--samples", samples, "Binarisations to try")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd_sample->add_option("--seed", seed);
  cmd_sample->add_option("--out", out_path, "Mask (P5 PGM)")->required();
  add_solver_opts(cmd_sample);

  // metric psnr
  auto* cmd_metric = app.add_subcommand("metric", "Image quality metrics");
  cmd_metric->require_subcommand(1);
  std::string a_path, b_path;
  auto* cmd_psnr = cmd_metric->add_subcommand("psnr", "PSNR in dB (peak 255)");
  cmd_psnr->add_option("--a", a_path)->required();
  cmd_psnr->add_option("--b", b_path)->required();

  // bench
  BenchConfig bench;
  std::string corpus_dir, out_dir, prob_dir, dump_dir;
  std::vector<std::string> method_names{"belhachmi", "ps", "ps_nlpe", "random"};
  bench.densities = {0.01, 0.02, 0.03, 0.05, 0.08, 0.10};
  bench.jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* cmd_bench = app.add_subcommand("bench", "Quality/efficiency benchmark over a corpus");
  cmd_bench->add_option("--corpus", corpus_dir, "Directory of P5 PGM images")->required();
  cmd_bench->add_option("--out-dir", out_dir, "Where bench.csv, averages.tsv, plot.tsv go")
      ->required();
  cmd_bench->add_option("--densities", bench.densities)
      ->delimiter(',')
      ->check(density_range(false))
      ->capture_default_str();
  cmd_bench->add_option("--methods", method_names)
      ->delimiter(',')
      ->check(CLI::IsMember({"belhachmi", "ps", "ps_nlpe", "learned", "random"}))
      ->capture_default_str();
  cmd_bench->add_option("--seed", seed);
  cmd_bench->add_option("--ps-runs", bench.ps.runs)->capture_default_str();
  cmd_bench->add_option("--nlpe-cycles", bench.nlpe.cycles)->capture_default_str();
  cmd_bench->add_option("--prob-dir", prob_dir, "Learned masks <id>_d<density>.pfm");
  cmd_bench->add_option("--samples", bench.samples, "Binarisations per learned mask")
      ->capture_default_str();
  cmd_bench->add_option("--dump-dir", dump_dir, "Write masks and reconstructions here");
  cmd_bench->add_option("--jobs", bench.jobs, "Worker threads");
  add_solver_opts(cmd_bench);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n\n{}", e.what(), app.help());
    return kExitUsage;
  }

  install_logger(verbose);

  try {
    if (*cmd_inpaint) {
      const GrayImage f = load_image(image_path);
      const BinaryMask mask = load_mask(mask_path);
      const Solution sol = inpaint(f, mask, solve);
      if (!out_path.empty()) save_image(sol.image, out_path);
      fmt::print(out, "psnr_db={} iterations={} relative_residual={:.3e}{}\n",
                 format_psnr(psnr(sol.image, f)), sol.stats.iterations,
                 sol.stats.final_relative_residual,
                 sol.stats.hit_max_iter ? " warning=max_iter" : "");
    } else if (*cmd_bel) {
      const GrayImage f = load_image(image_path);
      const BinaryMask mask = mask_belhachmi(f, density_target);
      save_mask(mask, out_path);
      fmt::print(out, "density={} inpaintings=0\n", density(mask));
    } else if (*cmd_ps) {
      const GrayImage f = load_image(image_path);
      ps.density = density_target;
      ps.seed = seed;
      ps.solve = solve;
      const MaskResult res = probabilistic_sparsification(f, ps);
      save_mask(res.mask, out_path);
      if (!recon_path.empty()) save_image(res.reconstruction, recon_path);
      write_trace(res.trace, trace_path);
      fmt::print(out, "density={} psnr_db={} inpaintings={}\n", density(res.mask),
                 format_psnr(psnr_from_mse(res.mse)), res.trace.inpaintings);
    } else if (*cmd_nlpe) {
      const GrayImage f = load_image(image_path);
      const BinaryMask start = load_mask(mask_path);
      nlpe.seed = seed;
      nlpe.solve = solve;
      const MaskResult res = nonlocal_pixel_exchange(f, start, nlpe);
      save_mask(res.mask, out_path);
      if (!recon_path.empty()) save_image(res.reconstruction, recon_path);
      write_trace(res.trace, trace_path);
      fmt::print(out, "density={} psnr_db={} inpaintings={}\n", density(res.mask),
                 format_psnr(psnr_from_mse(res.mse)), res.trace.inpaintings);
    } else if (*cmd_sample) {
      const ProbMask c = load_prob_mask(prob_path);
      if (image_path.empty()) {
        const BinaryMask mask = binarize(c, seed);
        save_mask(mask, out_path);
        fmt::print(out, "density={}\n", density(mask));
      } else {
        const GrayImage f = load_image(image_path);
        const SampledMask best = best_of(c, f, samples, seed, solve);
        save_mask(best.mask, out_path);
        fmt::print(out, "density={} psnr_db={} inpaintings={} redraws={}\n", density(best.mask),
                   format_psnr(best.psnr_db), best.samples, best.redraws);
      }
    } else if (*cmd_psnr) {
      fmt::print(out, "{}\n", format_psnr(psnr(load_image(a_path), load_image(b_path))));
    } else if (*cmd_bench) {
      bench.methods.clear();
      for (const auto& m : method_names) bench.methods.push_back(parse_method(m));
      bench.seed = seed;
      bench.solve = solve;
      if (!prob_dir.empty()) bench.prob_dir = prob_dir;
      if (!dump_dir.empty()) bench.dump_dir = dump_dir;
      bench.validate();

      std::vector<std::string> failures;
      const auto corpus = load_corpus(corpus_dir, failures);
      if (corpus.empty()) throw DataError(fmt::format("no readable images in {}", corpus_dir));
      BenchResult res = run_benchmark(corpus, bench);
      res.failures.insert(res.failures.begin(), failures.begin(), failures.end());
      for (const auto& f : res.failures) fmt::print(err, "skipped: {}\n", f);
      if (res.records.empty()) throw DataError("every benchmark cell failed");

      const std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      {
        auto csv = open_output(dir / "bench.csv");
        write_bench_csv(res.records, csv);
      }
      const auto avgs = average_by_density(res.records);
      {
        auto tsv = open_output(dir / "averages.tsv");
        write_averages_tsv(avgs, tsv);
      }
      {
        auto tsv = open_output(dir / "plot.tsv");
        write_plot_tsv(avgs, tsv);
      }
      write_averages_tsv(avgs, out);
    }
  } catch (const DataError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitData;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitData;
  }
  return kExitOk;
}

}  // namespace maskopt
