// Acceptance checks, one PASS/FAIL line per criterion.
//
//   lpnp_acceptance            run all criteria
//   lpnp_acceptance 4 7        run a subset
//
// Exit status: 0 when every selected criterion passes, 77 when the only
// failures are criteria blocked on missing input data, 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "lpnp/lpnp.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace lpnp;
using lpnp::testing::random_image;

namespace {

enum class Status { Pass, Fail, Blocked };

struct Outcome {
  Status status;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome verdict(bool ok, std::string detail) {
  return Outcome{ok ? Status::Pass : Status::Fail, std::move(detail)};
}

const fs::path kCameraman = "data/cameraman256.pgm";

Image block_average(const Image& img, int factor) {
  Image out(img.width() / factor, img.height() / factor);
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      double acc = 0.0;
      for (int a = 0; a < factor; ++a)
        for (int b = 0; b < factor; ++b) acc += img(r * factor + a, c * factor + b);
      out(r, c) = acc / (factor * factor);
    }
  }
  return out;
}

Eigen::MatrixXd dense_matrix(const DenseWeights& w) {
  const auto n = static_cast<Eigen::Index>(w.dimension());
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      w.entries().data(), n, n);
}

struct Instance {
  Image guide;
  Image input;
  PatchParams params;
};

/// The 20 random instances shared by criteria 1 and 2.
std::vector<Instance> weight_instances() {
  std::vector<Instance> out;
  std::mt19937_64 gen(2024);
  for (int i = 0; i < 20; ++i) {
    const int w = 8 + static_cast<int>(gen() % 9);
    const int h = 8 + static_cast<int>(gen() % 9);
    PatchParams p;
    p.window_radius = 2 + i % 2;
    p.patch_side = (i / 2) % 2 == 0 ? 3 : 5;
    p.bandwidth = 0.1 + 0.05 * static_cast<double>(gen() % 8);
    out.push_back(Instance{random_image(w, h, gen()), random_image(w, h, gen()), p});
  }
  return out;
}

// 1 ---------------------------------------------------------------------------
Outcome weight_guarantees() {
  double asym = 0.0, row = 0.0, col = 0.0, lo = 1.0, hi = 0.0, neg = 0.0;
  for (const Instance& inst : weight_instances()) {
    const Eigen::MatrixXd w = dense_matrix(build_dense_weights(inst.guide, inst.params));
    asym = std::max(asym, (w - w.transpose()).cwiseAbs().maxCoeff());
    row = std::max(row, (w.rowwise().sum().array() - 1.0).abs().maxCoeff());
    col = std::max(col, (w.colwise().sum().array() - 1.0).abs().maxCoeff());
    neg = std::min(neg, w.minCoeff());
    const Eigen::VectorXd ev = lpnp::testing::symmetric_eigenvalues(w);
    lo = std::min(lo, ev.minCoeff());
    hi = std::max(hi, ev.maxCoeff());
  }
  const bool ok = asym <= 1e-12 && row <= 1e-10 && col <= 1e-10 && lo >= -1e-10 &&
                  hi <= 1.0 + 1e-10 && neg >= -1e-14;
  return verdict(ok, "max|W-W^T|=" + fmt("%.2e", asym) + " row=" + fmt("%.2e", row) +
                         " col=" + fmt("%.2e", col) + " eig=[" + fmt("%.3e", lo) + ", " +
                         fmt("%.12f", hi) + "]");
}

// 2 ---------------------------------------------------------------------------
Outcome three_pass_filter() {
  double worst = 0.0;
  for (const Instance& inst : weight_instances()) {
    const Image fast = dsg_nlm_denoise(inst.input, inst.guide, inst.params);
    const Eigen::VectorXd dense =
        dense_matrix(build_dense_weights(inst.guide, inst.params)) * lpnp::testing::to_vector(inst.input);
    worst = std::max(worst, max_abs_diff(fast, lpnp::testing::to_image(dense, inst.input.width(),
                                                                        inst.input.height())));
  }
  return verdict(worst <= 1e-10, "max-abs vs dense W*v = " + fmt("%.2e", worst));
}

// 3 ---------------------------------------------------------------------------
Outcome patch_distances() {
  const Image guide = random_image(48, 40, 77);
  std::mt19937_64 gen(78);
  double worst = 0.0;
  for (int np : {3, 7, 11}) {
    const PatchParams p{np, 8, 0.1};
    for (int trial = 0; trial < 12; ++trial) {
      const Offset t{static_cast<int>(gen() % 17) - 8, static_cast<int>(gen() % 17) - 8};
      const Image map = patch_distance_map(guide, t, p);
      for (int r = 0; r < guide.height(); ++r) {
        for (int c = 0; c < guide.width(); ++c) {
          const double d = lpnp::testing::direct_patch_ssd(guide, {r, c}, t, np);
          if (d > 0.0) worst = std::max(worst, std::abs(map(r, c) - d) / d);
          else worst = std::max(worst, std::abs(map(r, c)));
        }
      }
    }
  }
  return verdict(worst <= 1e-9, "max relative error = " + fmt("%.2e", worst));
}

// 4 ---------------------------------------------------------------------------
Outcome timing_shape() {
  const Image img = read_image(kCameraman);
  std::vector<double> fast;
  std::string detail = "fast(s):";
  std::optional<Image> fast17;
  for (int np : {11, 17, 23, 29}) {
    const PatchParams p{np, 21, 0.1};
    std::vector<double> runs;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t = Clock::now();
      Image out = dsg_nlm_denoise(img, img, p);
      runs.push_back(seconds_since(t));
      if (np == 17) fast17 = std::move(out);
    }
    std::sort(runs.begin(), runs.end());
    fast.push_back(runs[1]);
    detail += " " + std::to_string(np) + "=" + fmt("%.3f", runs[1]);
  }
  const double spread = *std::max_element(fast.begin(), fast.end()) /
                        *std::min_element(fast.begin(), fast.end());
  const auto t = Clock::now();
  const Image brute = dsg_nlm_denoise_brute_force(img, img, PatchParams{17, 21, 0.1});
  const double brute_s = seconds_since(t);
  const double speedup = brute_s / fast[1];
  const double agree = max_abs_diff(brute, *fast17);
  detail += "; max/min=" + fmt("%.2f", spread) + "; brute(17)=" + fmt("%.2f", brute_s) +
            "s speedup=" + fmt("%.1f", speedup) + "x; agreement=" + fmt("%.1e", agree);
  return verdict(spread < 2.0 && speedup >= 10.0 && agree <= 1e-9, detail);
}

// 5 ---------------------------------------------------------------------------
Outcome adjoint_and_gradients() {
  double adj = 0.0;
  std::uint64_t seed = 500;
  for (Boundary b : {Boundary::Periodic, Boundary::Symmetric}) {
    for (int k : {2, 4}) {
      const SuperResOp op{gaussian_kernel(1.5, 5), k, b};
      for (int i = 0; i < 20; ++i, ++seed) {
        const Image x = random_image(64, 48, seed, -1.0, 1.0);
        const Image y = random_image(64 / k, 48 / k, seed + 10000, -1.0, 1.0);
        const Image ax = sr_apply(op, x);
        const double err = std::abs(dot(ax, y) - dot(x, sr_adjoint(op, y))) /
                           (std::sqrt(squared_norm(ax)) * std::sqrt(squared_norm(y)));
        adj = std::max(adj, err);
      }
    }
  }
  auto fd_error = [](const std::function<double(const Image&)>& f,
                     const std::function<Image(const Image&)>& g, const Image& x, const Image& d) {
    const double eps = 1e-5;
    const double fd = (f(x + eps * d) - f(x - eps * d)) / (2.0 * eps);
    const double an = dot(g(x), d);
    return std::abs(fd - an) / std::abs(an);
  };
  double sr_fd = 0.0;
  double qis_fd = 0.0;
  const SuperResOp op{gaussian_kernel(1.5, 5), 2, Boundary::Symmetric};
  const Image y = random_image(16, 16, 3);
  const QisModel m{16, 16.0};
  const QisCounts counts = qis_simulate(random_image(32, 32, 4), m, 5);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Image x = random_image(32, 32, 100 + s, 0.1, 0.9);
    const Image d = random_image(32, 32, 200 + s, -1.0, 1.0);
    sr_fd = std::max(sr_fd, fd_error([&](const Image& z) { return sr_data_term(op, z, y); },
                                     [&](const Image& z) { return sr_gradient(op, z, y); }, x, d));
    qis_fd = std::max(qis_fd, fd_error([&](const Image& z) { return qis_data_term(z, counts, m); },
                                       [&](const Image& z) { return qis_gradient(z, counts, m); }, x, d));
  }
  return verdict(adj <= 1e-10 && sr_fd < 1e-5 && qis_fd < 1e-5,
                 "adjoint rel=" + fmt("%.2e", adj) + " sr grad rel=" + fmt("%.2e", sr_fd) +
                     " qis grad rel=" + fmt("%.2e", qis_fd));
}

// 6 ---------------------------------------------------------------------------
Outcome identity_sanity() {
  const Image y = random_image(64, 64, 6, -0.5, 1.5);
  const ProblemSpec prob{.gradient = [y](const Image& x) { return x - y; },
                         .objective = {},
                         .initial = Image(64, 64, 0.5)};
  SolverConfig cfg;
  cfg.denoiser = DenoiserKind::Identity;
  cfg.alpha = 1.05;
  cfg.rho = 1.0;
  cfg.max_iters = 500;
  cfg.stop_tol = 0.0;
  const auto t = Clock::now();
  const SolveResult r = linearized_pnp_admm(prob, cfg);
  const double err = max_abs_diff(r.v, project(y, make_box(0.0, 1.0)));
  const double secs = seconds_since(t);
  return verdict(err < 1e-6 && secs < 10.0,
                 "max|v - clamp(y)|=" + fmt("%.2e", err) + " after 500 iterations");
}

// 7 ---------------------------------------------------------------------------
Outcome convergence_ordering() {
  const Image truth = block_average(read_image(kCameraman), 4);
  const SuperResOp op{gaussian_kernel(1.5, 5), 2, Boundary::Periodic};
  const Image y = sr_simulate(truth, op, 2.0 / 255.0, 7);
  const ProblemSpec prob = make_superres_problem(op, y, truth);
  SolverConfig cfg;
  cfg.alpha = default_superres_alpha(op, 64, 64);
  // Bandwidth 0.05: at much smaller bandwidths NLM degenerates towards the
  // identity and the comparison says nothing about the filters.
  cfg.rho = 1.0;
  cfg.lambda = 0.05 * 0.05;
  cfg.max_iters = 250;
  cfg.denoiser = DenoiserKind::DsgNlmFixed;
  const SolveResult fixed = linearized_pnp_admm(prob, cfg);
  cfg.denoiser = DenoiserKind::Nlm;
  const SolveResult nlm = linearized_pnp_admm(prob, cfg);

  bool monotone = true;
  for (std::size_t i = fixed.log.size() - 49; i < fixed.log.size(); ++i) {
    monotone = monotone && fixed.log[i].primal <= fixed.log[i - 1].primal + 1e-12 &&
               fixed.log[i].dual <= fixed.log[i - 1].dual + 1e-12;
  }
  const double pf = fixed.log.back().primal;
  const double pn = nlm.log.back().primal;
  return verdict(pf * 100.0 <= pn && monotone,
                 "primal F-DSG=" + fmt("%.3e", pf) + " NLM=" + fmt("%.3e", pn) + " dual F-DSG=" +
                     fmt("%.3e", fixed.log.back().dual) + " NLM=" + fmt("%.3e", nlm.log.back().dual) +
                     " PSNR F-DSG=" + fmt("%.2f", fixed.log.back().psnr) +
                     " NLM=" + fmt("%.2f", nlm.log.back().psnr) +
                     (monotone ? "; last 50 monotone" : "; last 50 NOT monotone"));
}

// 8 ---------------------------------------------------------------------------
struct PsnrRuns {
  double sr;
  double qis;
};

/// The tuned settings of configs/sr_fdsg.ini and configs/qis_fdsg.ini.
PsnrRuns plausibility_runs(const Image& truth) {
  const SuperResOp op{gaussian_kernel(1.5, 5), 2, Boundary::Periodic};
  const Image y = sr_simulate(truth, op, 2.0 / 255.0, 1);
  SolverConfig sr;
  sr.alpha = default_superres_alpha(op, truth.width(), truth.height());
  sr.rho = 0.1;
  sr.lambda = 1e-5;
  sr.freeze_at = 40;
  sr.max_iters = 250;
  const double sr_psnr = linearized_pnp_admm(make_superres_problem(op, y, truth), sr).log.back().psnr;

  const QisModel m{16, 16.0};
  const QisCounts counts = qis_simulate(truth, m, 1);
  SolverConfig qis;
  qis.alpha = 256.0;
  qis.rho = 64.0;
  qis.lambda = 64.0 * 0.12 * 0.12;
  qis.freeze_at = 40;
  qis.max_iters = 250;
  const double qis_psnr = linearized_pnp_admm(make_qis_problem(counts, m, truth), qis).log.back().psnr;
  return PsnrRuns{sr_psnr, qis_psnr};
}

Outcome psnr_plausibility() {
  std::optional<fs::path> house;
  if (const char* env = std::getenv("LPNP_HOUSE_IMAGE")) house = env;
  else if (fs::exists("data/house.pgm")) house = "data/house.pgm";

  if (house && fs::exists(*house)) {
    const PsnrRuns r = plausibility_runs(read_image(*house));
    return verdict(r.sr >= 31.0 && r.qis >= 30.0, "House: super-resolution PSNR=" + fmt("%.2f", r.sr) +
                                                      " dB (floor 31), QIS PSNR=" + fmt("%.2f", r.qis) +
                                                      " dB (floor 30)");
  }
  const PsnrRuns r = plausibility_runs(read_image(kCameraman));
  return Outcome{Status::Blocked,
                 "House test image not available (set LPNP_HOUSE_IMAGE or add data/house.pgm); "
                 "the thresholds are defined on House only. Same pipeline on cameraman: "
                 "super-resolution PSNR=" + fmt("%.2f", r.sr) + " dB, QIS PSNR=" + fmt("%.2f", r.qis) +
                     " dB"};
}

// 9 ---------------------------------------------------------------------------
double first_time_at(const IterationLog& log, double level) {
  for (const IterationRecord& rec : log) {
    if (rec.psnr >= level) return rec.time_ms;
  }
  return std::numeric_limits<double>::infinity();
}

Outcome linearized_vs_cg() {
  const Image truth = read_image(kCameraman);
  const SuperResOp op{gaussian_kernel(1.5, 5), 2, Boundary::Symmetric};
  const Image y = sr_simulate(truth, op, 2.0 / 255.0, 9);
  const ProblemSpec prob = make_superres_problem(op, y, truth);
  SolverConfig cfg;
  cfg.alpha = default_superres_alpha(op, 256, 256);
  cfg.rho = 0.1;
  cfg.lambda = 1e-5;
  cfg.freeze_at = 40;
  cfg.max_iters = 250;
  cfg.cg_tol = 1e-6;
  const SolveResult lin = linearized_pnp_admm(prob, cfg);
  const SolveResult cg = standard_pnp_admm_cg(prob, cfg);
  const double level = lin.log.back().psnr - 0.5;
  const double t_lin = first_time_at(lin.log, level);
  const double t_cg = first_time_at(cg.log, level);
  return verdict(t_lin < t_cg,
                 "target " + fmt("%.2f", level) + " dB: linearized " + fmt("%.0f", t_lin) +
                     " ms, ADMM+CG " + fmt("%.0f", t_cg) + " ms (final PSNR " +
                     fmt("%.2f", lin.log.back().psnr) + " vs " + fmt("%.2f", cg.log.back().psnr) +
                     " dB, totals " + fmt("%.0f", lin.log.back().time_ms) + " vs " +
                     fmt("%.0f", cg.log.back().time_ms) + " ms)");
}

// 10 --------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "lpnp_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  write_image(block_average(read_image(kCameraman), 4), root / "gt.pgm", ImageFormat::Pgm8);
  const std::string gt = "paths.ground_truth=" + (root / "gt.pgm").string();

  const std::vector<std::vector<std::string>> runs = {
      {"simulate-sr", "--set", gt, "--seed", "3"},
      {"simulate-qis", "--set", gt, "--seed", "3"},
      {"restore", "--set", gt, "--seed", "3", "--iters", "60", "--rho", "0.1", "--lambda", "1e-5"},
      {"restore", "--set", gt, "--seed", "3", "--iters", "60", "--solver", "standard-cg", "--rho",
       "0.1", "--lambda", "1e-5"},
      {"restore", "--set", gt, "--set", "problem.type=qis", "--seed", "3", "--iters", "60", "--alpha",
       "256", "--rho", "64", "--lambda", "0.9216"},
  };
  int files = 0;
  std::string detail;
  bool ok = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<fs::path> dirs;
    for (const char* tag : {"a", "b"}) {
      std::vector<std::string> args{"lpnp"};
      args.insert(args.end(), runs[i].begin(), runs[i].end());
      args.push_back("--output-dir");
      args.push_back((root / tag / std::to_string(i)).string());
      std::ostringstream out;
      std::ostringstream err;
      if (cli::run_cli(args, out, err) != 0) {
        fs::remove_all(root);
        return verdict(false, "command failed: " + runs[i][0] + ": " + err.str());
      }
      const std::string text = out.str();
      const auto pos = text.find("run_dir=");
      dirs.emplace_back(text.substr(pos + 8, text.find('\n', pos) - pos - 8));
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const auto ext = entry.path().extension();
      if (ext != ".csv" && ext != ".pfm") continue;
      ++files;
      if (slurp(entry.path()) != slurp(dirs[1] / entry.path().filename())) {
        ok = false;
        detail += " differs: " + entry.path().filename().string();
      }
    }
  }
  fs::remove_all(root);
  return verdict(ok && files >= 10, std::to_string(files) + " CSV/PFM files compared across " +
                                        std::to_string(runs.size()) + " repeated runs" + detail);
}

struct Criterion {
  int id;
  const char* title;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "weight-matrix guarantees", weight_guarantees},
    {2, "three-pass filter equals dense W*v", three_pass_filter},
    {3, "integral-image patch distances", patch_distances},
    {4, "fast DSG-NLM timing shape", timing_shape},
    {5, "adjoint and gradient checks", adjoint_and_gradients},
    {6, "linearized solver sanity", identity_sanity},
    {7, "F-DSG-NLM vs NLM residual ordering", convergence_ordering},
    {8, "PSNR plausibility", psnr_plausibility},
    {9, "linearized beats ADMM+CG to within 0.5 dB", linearized_vs_cg},
    {10, "determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  bool failed = false;
  bool blocked = false;
  for (const Criterion& c : kCriteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    const auto t = Clock::now();
    Outcome o{Status::Fail, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = Outcome{Status::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t);
    const char* label = o.status == Status::Pass ? "PASS" : "FAIL";
    std::printf("CRITERION %d: %s [%s] %s%s (%.1f s)\n", c.id, label, c.title,
                o.status == Status::Blocked ? "blocked: " : "", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed = failed || o.status == Status::Fail;
    blocked = blocked || o.status == Status::Blocked;
  }
  if (failed) return 1;
  return blocked ? 77 : 0;
}
