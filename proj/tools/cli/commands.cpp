#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>

#include "lpnp/dense_weights.hpp"
#include "lpnp/error.hpp"
#include "lpnp/image_io.hpp"
#include "lpnp/iteration_log.hpp"
#include "lpnp/problems.hpp"
#include "lpnp/rng.hpp"

namespace lpnp::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string scientific(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

fs::path make_run_dir(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = run_directory(cfg);
  fs::create_directories(dir);
  out << "run_dir=" << dir.string() << '\n';
  return dir;
}

/// Writes the full-precision PFM and an 8-bit preview.
void write_pair(const Image& img, const fs::path& dir, const std::string& stem) {
  write_image(img, dir / (stem + ".pfm"), ImageFormat::Pfm);
  write_image(img, dir / (stem + ".pgm"), ImageFormat::Pgm8);
}

Image crop(const Image& img, int width, int height) {
  Image out(width, height);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) out(r, c) = img(r, c);
  return out;
}

void require_divisible(const Image& img, int factor, const fs::path& path) {
  if (img.width() % factor != 0 || img.height() % factor != 0) {
    throw ConfigError(path.string() + ": size " + std::to_string(img.width()) + "x" +
                      std::to_string(img.height()) + " is not divisible by superres.factor " +
                      std::to_string(factor));
  }
}

/// Piecewise-smooth test scene with mild noise, used when no input is given.
Image synthetic_scene(int size, std::uint64_t seed) {
  Rng rng(seed);
  Image img(size, size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double base = ((r / 32 + c / 32) % 2 == 0) ? 0.3 : 0.7;
      img(r, c) = base + 0.15 * std::sin(0.07 * r) * std::cos(0.05 * c) + 0.05 * rng.normal();
    }
  }
  return img;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_qis_meta(const fs::path& path, const QisModel& m, std::uint64_t seed) {
  std::ofstream meta(path, std::ios::binary);
  meta << "[qis]\n"
       << "oversampling = " << m.oversampling << '\n'
       << "gain = " << format_real(m.gain) << '\n'
       << "seed = " << seed << '\n';
  if (!meta) throw IoError(IoError::Kind::Write, "cannot write " + path.string());
}

}  // namespace

int cmd_denoise(const RunConfig& cfg, bool oracle, std::ostream& out) {
  const Image input = read_image(*cfg.input);
  const Image guide = cfg.guide ? read_image(*cfg.guide) : input;
  if (!input.same_shape(guide)) throw ConfigError("paths.guide must match the input size");
  if (oracle && cfg.denoise_method != DenoiseMethod::DsgNlm) {
    throw ConfigError("--oracle compares against the dense DSG-NLM matrix; use denoise.method = dsg");
  }
  const PatchParams p{cfg.patch_side, cfg.window_radius, cfg.bandwidth.value_or(0.1)};
  const fs::path dir = make_run_dir(cfg, out);

  const auto start = Clock::now();
  const Image result = cfg.denoise_method == DenoiseMethod::DsgNlm ? dsg_nlm_denoise(input, guide, p)
                                                                   : nlm_denoise(input, guide, p);
  const double elapsed = seconds_since(start);
  write_pair(result, dir, "denoised");
  out << "time_s=" << fixed(elapsed, 4) << '\n';

  if (oracle) {
    const int w = std::min(cfg.oracle_crop, input.width());
    const int h = std::min(cfg.oracle_crop, input.height());
    const Image in_crop = crop(input, w, h);
    const Image guide_crop = crop(guide, w, h);
    const double diff = max_abs_diff(dsg_nlm_denoise(in_crop, guide_crop, p),
                                     build_dense_weights(guide_crop, p).apply(in_crop));
    out << "oracle_max_abs_diff=" << scientific(diff) << '\n';
    if (!(diff < 1e-10)) return kExitInternal;
  }
  return kExitOk;
}

int cmd_simulate_sr(const RunConfig& cfg, std::ostream& out) {
  const Image truth = read_image(*cfg.ground_truth);
  require_divisible(truth, cfg.superres.factor, *cfg.ground_truth);
  const fs::path dir = make_run_dir(cfg, out);
  const Image y = sr_simulate(truth, cfg.superres.op(), cfg.superres.noise_sigma, cfg.seed);
  write_pair(y, dir, "y");
  return kExitOk;
}

int cmd_simulate_qis(const RunConfig& cfg, std::ostream& out) {
  const Image truth = read_image(*cfg.ground_truth);
  const fs::path dir = make_run_dir(cfg, out);
  const QisCounts counts = qis_simulate(truth, cfg.qis, cfg.seed);
  write_image(counts.ones, dir / "ones.pfm", ImageFormat::Pfm);
  write_image(counts.zeros, dir / "zeros.pfm", ImageFormat::Pfm);
  write_qis_meta(dir / "qis.ini", cfg.qis, cfg.seed);
  return kExitOk;
}

int cmd_restore(const RunConfig& cfg, std::ostream& out) {
  std::optional<Image> truth;
  if (cfg.ground_truth) truth = read_image(*cfg.ground_truth);
  SolverConfig solver = cfg.solver_cfg;
  std::optional<ProblemSpec> prob;
  std::optional<Image> simulated_y;
  std::optional<QisCounts> simulated_counts;

  if (cfg.problem == ProblemType::SuperRes) {
    const SuperResOp op = cfg.superres.op();
    const int k = op.factor;
    Image y = cfg.observation ? read_image(*cfg.observation) : Image(1, 1);
    if (!cfg.observation) {
      require_divisible(*truth, k, *cfg.ground_truth);
      y = sr_simulate(*truth, op, cfg.superres.noise_sigma, cfg.seed);
      simulated_y = y;
    }
    if (truth && (truth->width() != k * y.width() || truth->height() != k * y.height())) {
      throw ConfigError("ground truth size must be superres.factor times the observation size");
    }
    prob = make_superres_problem(op, y, truth);
    if (!cfg.alpha_given) solver.alpha = default_superres_alpha(op, k * y.width(), k * y.height());
  } else {
    QisCounts counts{Image(1, 1), Image(1, 1)};
    if (cfg.ones) {
      counts.ones = read_image(*cfg.ones);
      if (cfg.zeros) {
        counts.zeros = read_image(*cfg.zeros);
      } else {
        counts.zeros = Image(counts.ones.width(), counts.ones.height(),
                             static_cast<double>(cfg.qis.oversampling)) -
                       counts.ones;
      }
    } else {
      counts = qis_simulate(*truth, cfg.qis, cfg.seed);
      simulated_counts = counts;
    }
    try {
      validate(counts, cfg.qis);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("jot counts do not match the QIS model: ") + e.what());
    }
    if (truth && !truth->same_shape(counts.ones)) {
      throw ConfigError("ground truth size must match the jot-count images");
    }
    prob = make_qis_problem(counts, cfg.qis, truth, cfg.qis_epsilon);
    if (!cfg.alpha_given) solver.alpha = default_qis_alpha(counts, cfg.qis);
  }

  const fs::path dir = make_run_dir(cfg, out);
  if (simulated_y) write_pair(*simulated_y, dir, "y");
  if (simulated_counts) {
    write_image(simulated_counts->ones, dir / "ones.pfm", ImageFormat::Pfm);
    write_image(simulated_counts->zeros, dir / "zeros.pfm", ImageFormat::Pfm);
    write_qis_meta(dir / "qis.ini", cfg.qis, cfg.seed);
  }
  out << "alpha=" << format_real(solver.alpha) << '\n';

  const SolveResult result = cfg.solver == SolverKind::Linearized
                                 ? linearized_pnp_admm(*prob, solver)
                                 : standard_pnp_admm_cg(*prob, solver);
  write_pair(result.v, dir, "restored");
  write_iteration_log_csv(dir / "log.csv", result.log, cfg.record_time);
  const IterationRecord& last = result.log.back();
  out << "iterations=" << result.log.size() << '\n'
      << "primal=" << scientific(last.primal) << " dual=" << scientific(last.dual) << '\n';
  if (truth) out << "PSNR=" << fixed(last.psnr, 2) << " dB\n";
  return kExitOk;
}

int cmd_bench_denoiser(const RunConfig& cfg, std::ostream& out) {
  const BenchSettings& b = cfg.bench;
  const Image img = cfg.input ? read_image(*cfg.input) : synthetic_scene(b.size, cfg.seed);
  const fs::path dir = make_run_dir(cfg, out);
  std::ofstream csv(dir / "bench.csv", std::ios::binary);
  const std::string header = "np,fast_s,brute_s,speedup";
  out << header << '\n';
  csv << header << '\n';

  double worst = 0.0;
  for (int np : b.patch_sides) {
    const PatchParams p{np, b.window_radius, cfg.bandwidth.value_or(0.1)};
    std::vector<double> fast_s;
    std::vector<double> brute_s;
    std::optional<Image> fast;
    std::optional<Image> brute;
    for (int rep = 0; rep < b.repeats; ++rep) {
      auto start = Clock::now();
      fast = dsg_nlm_denoise(img, img, p);
      fast_s.push_back(seconds_since(start));
      start = Clock::now();
      brute = dsg_nlm_denoise_brute_force(img, img, p);
      brute_s.push_back(seconds_since(start));
    }
    worst = std::max(worst, max_abs_diff(*fast, *brute));
    const double f = median(fast_s);
    const double s = median(brute_s);
    const std::string row = std::to_string(np) + "," + fixed(f, 4) + "," + fixed(s, 4) + "," +
                            fixed(s / f, 2);
    out << row << '\n';
    csv << row << '\n';
  }
  if (!csv) throw IoError(IoError::Kind::Write, "cannot write bench.csv");
  if (!(worst <= 1e-9)) {
    out << "error: fast and brute-force outputs differ by " << scientific(worst) << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linearized plug-and-play ADMM image restoration", "lpnp"};
  app.require_subcommand(1);

  std::optional<std::string> config;
  std::vector<std::string> sets;
  Overrides overrides;
  bool oracle = false;
  bool record_time = false;

  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static constexpr Flag kFlags[] = {
      {"--rho", "solver.rho", "ADMM penalty"},
      {"--lambda", "solver.lambda", "regularization weight"},
      {"--alpha", "solver.alpha", "linearization coefficient"},
      {"--iters", "solver.iters", "iteration count"},
      {"--seed", "run.seed", "simulation seed"},
      {"--solver", "solver.type", "linearized | standard-cg"},
      {"--denoiser", "solver.denoiser", "nlm | dsg-adaptive | dsg-fixed | identity"},
      {"--freeze-at", "solver.freeze_at", "iteration at which dsg-fixed freezes its guide"},
      {"--output-dir", "run.output_dir", "parent directory of run directories"},
  };
  std::vector<std::optional<std::string>> flag_values(std::size(kFlags));

  const char* names[] = {"denoise", "simulate-sr", "simulate-qis", "restore", "bench-denoiser"};
  const char* descriptions[] = {
      "apply NLM or DSG-NLM to an image", "simulate a blurred, decimated, noisy observation",
      "simulate one-bit QIS jot counts", "run plug-and-play ADMM restoration",
      "time fast against brute-force DSG-NLM"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("-c,--config", config, "INI configuration file");
    sub->add_option("--set", sets, "override any key: section.key=value");
    for (std::size_t f = 0; f < std::size(kFlags); ++f) {
      sub->add_option(kFlags[f].name, flag_values[f], kFlags[f].help);
    }
    sub->add_flag("--record-time", record_time, "write wall-clock times into log.csv");
    if (std::string(names[i]) == "denoise") {
      sub->add_flag("--oracle", oracle, "check a crop against the dense weight matrix");
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    for (const std::string& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
      overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    for (std::size_t f = 0; f < std::size(kFlags); ++f) {
      if (flag_values[f]) overrides.emplace_back(kFlags[f].key, *flag_values[f]);
    }
    if (record_time) overrides.emplace_back("run.record_time", "true");
    std::optional<fs::path> config_path;
    if (config) config_path = *config;
    const RunConfig cfg = load_run_config(command, config_path, overrides);

    if (command == "denoise") return cmd_denoise(cfg, oracle, out);
    if (command == "simulate-sr") return cmd_simulate_sr(cfg, out);
    if (command == "simulate-qis") return cmd_simulate_qis(cfg, out);
    if (command == "restore") return cmd_restore(cfg, out);
    return cmd_bench_denoiser(cfg, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == IoError::Kind::Write ? kExitInternal : kExitConfig;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace lpnp::cli
