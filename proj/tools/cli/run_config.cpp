#include "run_config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "lpnp/error.hpp"
#include "lpnp/iteration_log.hpp"

namespace lpnp::cli {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"seed", "output_dir", "record_time"}},
      {"paths", {"ground_truth", "observation", "ones", "zeros", "input", "guide"}},
      {"problem", {"type"}},
      {"superres", {"factor", "blur_sigma", "blur_radius", "boundary", "noise_sigma"}},
      {"qis", {"oversampling", "gain", "epsilon"}},
      {"patch", {"patch_side", "window_radius", "bandwidth"}},
      {"solver",
       {"type", "denoiser", "rho", "lambda", "alpha", "iters", "freeze_at", "constraint", "box_lo",
        "box_hi", "cg_tol", "cg_max_iters", "stop_tol"}},
      {"denoise", {"method", "oracle_crop"}},
      {"bench", {"size", "window_radius", "patch_sides", "repeats"}},
  };
  return keys;
}

void check_key(const std::string& dotted) {
  const auto dot = dotted.find('.');
  if (dot == std::string::npos) throw ConfigError("config key '" + dotted + "' needs a section");
  const auto section = schema().find(dotted.substr(0, dot));
  if (section == schema().end() || !section->second.count(dotted.substr(dot + 1))) {
    throw ConfigError("unknown config key '" + dotted + "'");
  }
}

/// Typed access to the merged tree with key-qualified error messages.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> text(const std::string& key) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) {
      std::string s = *v;
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    }
    return std::nullopt;
  }

  template <class T>
  std::optional<T> number(const std::string& key) const {
    const auto s = text(key);
    if (!s) return std::nullopt;
    T value{};
    const char* end = s->data() + s->size();
    const auto res = std::from_chars(s->data(), end, value);
    if (res.ec != std::errc() || res.ptr != end) {
      throw ConfigError("config key '" + key + "': cannot parse '" + *s + "' as a number");
    }
    return value;
  }

  bool flag(const std::string& key, bool fallback) const {
    const auto s = text(key);
    if (!s) return fallback;
    if (*s == "true" || *s == "1" || *s == "yes") return true;
    if (*s == "false" || *s == "0" || *s == "no") return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + *s + "'");
  }

  template <class E>
  E choice(const std::string& key, E fallback, const std::map<std::string, E>& options) const {
    const auto s = text(key);
    if (!s) return fallback;
    const auto it = options.find(*s);
    if (it == options.end()) {
      std::string allowed;
      for (const auto& [name, value] : options) allowed += (allowed.empty() ? "" : "|") + name;
      throw ConfigError("config key '" + key + "': '" + *s + "' is not one of " + allowed);
    }
    return it->second;
  }

 private:
  const pt::ptree& tree_;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    int v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw ConfigError("config key '" + key + "': bad list entry '" + item + "'");
    }
    out.push_back(v);
  }
  require(!out.empty(), "config key '" + key + "' is empty");
  return out;
}

fs::path resolve(const fs::path& base, const std::string& value) {
  const fs::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

void require_file(const std::optional<fs::path>& p, const std::string& what) {
  if (!p) throw ConfigError("missing required path: " + what);
  if (!fs::is_regular_file(*p)) throw ConfigError("file not found: " + p->string());
}

void check_optional_file(const std::optional<fs::path>& p) {
  if (p && !fs::is_regular_file(*p)) throw ConfigError("file not found: " + p->string());
}

/// Library-level checks, rethrown as configuration errors.
template <class F>
void validated(F&& check) {
  try {
    check();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

void validate_files(const RunConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "denoise") {
    require_file(cfg.input, "paths.input");
    check_optional_file(cfg.guide);
  } else if (c == "simulate-sr" || c == "simulate-qis") {
    require_file(cfg.ground_truth, "paths.ground_truth");
  } else if (c == "restore") {
    check_optional_file(cfg.ground_truth);
    if (cfg.problem == ProblemType::SuperRes) {
      if (!cfg.observation) require_file(cfg.ground_truth, "paths.observation or paths.ground_truth");
      check_optional_file(cfg.observation);
    } else {
      if (!cfg.ones) require_file(cfg.ground_truth, "paths.ones or paths.ground_truth");
      check_optional_file(cfg.ones);
      check_optional_file(cfg.zeros);
      require(!cfg.zeros || cfg.ones, "paths.zeros given without paths.ones");
    }
  } else if (c == "bench-denoiser") {
    check_optional_file(cfg.input);
  }
}

std::string boundary_name(Boundary b) { return b == Boundary::Periodic ? "periodic" : "symmetric"; }

std::string denoiser_name(DenoiserKind k) {
  switch (k) {
    case DenoiserKind::Nlm:
      return "nlm";
    case DenoiserKind::DsgNlmAdaptive:
      return "dsg-adaptive";
    case DenoiserKind::DsgNlmFixed:
      return "dsg-fixed";
    case DenoiserKind::Identity:
      return "identity";
  }
  return "?";
}

std::string constraint_text(const ConstraintSet& c) {
  if (std::holds_alternative<Unconstrained>(c)) return "none";
  if (std::holds_alternative<NonNegative>(c)) return "nonnegative";
  const Box& b = std::get<Box>(c);
  return "box " + format_real(b.lo) + " " + format_real(b.hi);
}

}  // namespace

SuperResOp SuperResSettings::op() const {
  return SuperResOp{gaussian_kernel(blur_sigma, blur_radius), factor, boundary};
}

RunConfig load_run_config(const std::string& command, const std::optional<fs::path>& file,
                          const Overrides& overrides) {
  pt::ptree tree;
  fs::path base;
  if (file) {
    if (!fs::is_regular_file(*file)) throw ConfigError("file not found: " + file->string());
    try {
      pt::read_ini(file->string(), tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError("cannot parse config " + file->string() + ": " + e.message() +
                        " (line " + std::to_string(e.line()) + ")");
    }
    base = file->parent_path();
    for (const auto& [section, keys] : tree) {
      if (keys.empty() && !keys.data().empty()) {
        throw ConfigError("config key '" + section + "' must live in a section");
      }
      for (const auto& [key, value] : keys) check_key(section + "." + key);
    }
  }
  // Paths from the file are relative to the file; paths given as flags are
  // relative to the working directory.
  std::set<std::string> overridden;
  for (const auto& [key, value] : overrides) {
    check_key(key);
    tree.put(pt::ptree::path_type(key, '.'), value);
    overridden.insert(key);
  }
  const Reader r(tree);
  auto path_of = [&](const std::string& key) -> std::optional<fs::path> {
    const auto v = r.text(key);
    if (!v || v->empty()) return std::nullopt;
    return overridden.count(key) ? fs::path(*v) : resolve(base, *v);
  };

  RunConfig cfg;
  cfg.command = command;
  if (auto seed = r.number<std::uint64_t>("run.seed")) cfg.seed = *seed;
  if (auto out = path_of("run.output_dir")) cfg.output_dir = *out;
  cfg.record_time = r.flag("run.record_time", false);

  cfg.ground_truth = path_of("paths.ground_truth");
  cfg.observation = path_of("paths.observation");
  cfg.ones = path_of("paths.ones");
  cfg.zeros = path_of("paths.zeros");
  cfg.input = path_of("paths.input");
  cfg.guide = path_of("paths.guide");

  cfg.problem = r.choice<ProblemType>("problem.type", command == "simulate-qis" ? ProblemType::Qis
                                                                                : ProblemType::SuperRes,
                                      {{"sr", ProblemType::SuperRes}, {"qis", ProblemType::Qis}});

  auto& sr = cfg.superres;
  sr.factor = r.number<int>("superres.factor").value_or(sr.factor);
  sr.blur_sigma = r.number<double>("superres.blur_sigma").value_or(sr.blur_sigma);
  sr.blur_radius = r.number<int>("superres.blur_radius").value_or(sr.blur_radius);
  sr.boundary = r.choice<Boundary>("superres.boundary", sr.boundary,
                                   {{"periodic", Boundary::Periodic}, {"symmetric", Boundary::Symmetric}});
  sr.noise_sigma = r.number<double>("superres.noise_sigma").value_or(sr.noise_sigma);

  cfg.qis.oversampling = r.number<int>("qis.oversampling").value_or(cfg.qis.oversampling);
  // eta defaults to K: unit mean exposure per pixel at x = 1
  cfg.qis.gain = r.number<double>("qis.gain").value_or(static_cast<double>(cfg.qis.oversampling));
  cfg.qis_epsilon = r.number<double>("qis.epsilon").value_or(cfg.qis_epsilon);

  cfg.patch_side = r.number<int>("patch.patch_side").value_or(cfg.patch_side);
  cfg.window_radius = r.number<int>("patch.window_radius").value_or(cfg.window_radius);
  cfg.bandwidth = r.number<double>("patch.bandwidth");

  cfg.solver = r.choice<SolverKind>("solver.type", SolverKind::Linearized,
                                    {{"linearized", SolverKind::Linearized},
                                     {"standard-cg", SolverKind::StandardCg}});
  SolverConfig& s = cfg.solver_cfg;
  s.denoiser = r.choice<DenoiserKind>("solver.denoiser", s.denoiser,
                                      {{"nlm", DenoiserKind::Nlm},
                                       {"dsg-adaptive", DenoiserKind::DsgNlmAdaptive},
                                       {"dsg-fixed", DenoiserKind::DsgNlmFixed},
                                       {"identity", DenoiserKind::Identity}});
  s.rho = r.number<double>("solver.rho").value_or(s.rho);
  s.lambda = r.number<double>("solver.lambda").value_or(s.lambda);
  if (auto a = r.number<double>("solver.alpha")) {
    s.alpha = *a;
    cfg.alpha_given = true;
  }
  s.max_iters = r.number<int>("solver.iters").value_or(s.max_iters);
  if (auto f = r.number<int>("solver.freeze_at")) s.freeze_at = *f;
  const std::string constraint = r.text("solver.constraint").value_or("box");
  const double lo = r.number<double>("solver.box_lo").value_or(0.0);
  const double hi = r.number<double>("solver.box_hi").value_or(1.0);
  if (constraint == "box") {
    s.constraint = Box{lo, hi};
  } else if (constraint == "nonnegative") {
    s.constraint = NonNegative{};
  } else if (constraint == "none") {
    s.constraint = Unconstrained{};
  } else {
    throw ConfigError("config key 'solver.constraint': '" + constraint +
                      "' is not one of box|nonnegative|none");
  }
  s.cg_tol = r.number<double>("solver.cg_tol").value_or(s.cg_tol);
  s.cg_max_iters = r.number<int>("solver.cg_max_iters").value_or(s.cg_max_iters);
  s.stop_tol = r.number<double>("solver.stop_tol").value_or(s.stop_tol);
  s.patch_side = cfg.patch_side;
  s.window_radius = cfg.window_radius;
  s.bandwidth = cfg.bandwidth;

  cfg.denoise_method = r.choice<DenoiseMethod>("denoise.method", cfg.denoise_method,
                                               {{"dsg", DenoiseMethod::DsgNlm}, {"nlm", DenoiseMethod::Nlm}});
  cfg.oracle_crop = r.number<int>("denoise.oracle_crop").value_or(cfg.oracle_crop);

  auto& b = cfg.bench;
  b.size = r.number<int>("bench.size").value_or(b.size);
  b.window_radius = r.number<int>("bench.window_radius").value_or(b.window_radius);
  if (auto list = r.text("bench.patch_sides")) b.patch_sides = parse_int_list("bench.patch_sides", *list);
  b.repeats = r.number<int>("bench.repeats").value_or(b.repeats);

  // range checks, all before any output is produced
  validated([&] {
    if (command == "restore") validate(s);
    if (command == "restore" && cfg.problem == ProblemType::SuperRes) validate(sr.op());
    if (command == "simulate-sr") validate(sr.op());
    if (cfg.problem == ProblemType::Qis || command == "simulate-qis") validate(cfg.qis);
    const double bw = command == "restore" ? effective_bandwidth(s) : cfg.bandwidth.value_or(0.1);
    if (command != "restore" || (bw > 0.0 && s.denoiser != DenoiserKind::Identity)) {
      validate(PatchParams{cfg.patch_side, cfg.window_radius, bw});
    }
  });
  require(sr.noise_sigma >= 0.0, "superres.noise_sigma must be >= 0");
  require(cfg.qis_epsilon > 0.0, "qis.epsilon must be positive");
  require(cfg.oracle_crop >= 1 && static_cast<std::size_t>(cfg.oracle_crop) * cfg.oracle_crop <= 4096,
          "denoise.oracle_crop must be between 1 and 64");
  require(b.size >= 1, "bench.size must be >= 1");
  require(b.window_radius >= 1, "bench.window_radius must be >= 1");
  require(b.repeats >= 1, "bench.repeats must be >= 1");
  for (int np : b.patch_sides) require(np >= 1 && np % 2 == 1, "bench.patch_sides must be odd");
  if (command == "restore" && cfg.solver == SolverKind::StandardCg) {
    require(cfg.problem == ProblemType::SuperRes,
            "solver.type standard-cg needs a quadratic data term (problem.type = sr)");
  }
  validate_files(cfg);
  return cfg;
}

std::string canonical_string(const RunConfig& cfg) {
  std::ostringstream out;
  auto path = [](const std::optional<fs::path>& p) { return p ? p->lexically_normal().string() : ""; };
  const SolverConfig& s = cfg.solver_cfg;
  out << "command=" << cfg.command << '\n'
      << "seed=" << cfg.seed << '\n'
      << "paths.ground_truth=" << path(cfg.ground_truth) << '\n'
      << "paths.observation=" << path(cfg.observation) << '\n'
      << "paths.ones=" << path(cfg.ones) << '\n'
      << "paths.zeros=" << path(cfg.zeros) << '\n'
      << "paths.input=" << path(cfg.input) << '\n'
      << "paths.guide=" << path(cfg.guide) << '\n'
      << "problem=" << (cfg.problem == ProblemType::SuperRes ? "sr" : "qis") << '\n'
      << "superres=" << cfg.superres.factor << ' ' << format_real(cfg.superres.blur_sigma) << ' '
      << cfg.superres.blur_radius << ' ' << boundary_name(cfg.superres.boundary) << ' '
      << format_real(cfg.superres.noise_sigma) << '\n'
      << "qis=" << cfg.qis.oversampling << ' ' << format_real(cfg.qis.gain) << ' '
      << format_real(cfg.qis_epsilon) << '\n'
      << "patch=" << cfg.patch_side << ' ' << cfg.window_radius << ' '
      << (cfg.bandwidth ? format_real(*cfg.bandwidth) : "auto") << '\n'
      << "solver=" << (cfg.solver == SolverKind::Linearized ? "linearized" : "standard-cg") << ' '
      << denoiser_name(s.denoiser) << ' ' << format_real(s.rho) << ' ' << format_real(s.lambda)
      << ' ' << (cfg.alpha_given ? format_real(s.alpha) : "auto") << ' ' << s.max_iters << ' '
      << (s.freeze_at ? std::to_string(*s.freeze_at) : "none") << ' '
      << constraint_text(s.constraint) << ' ' << format_real(s.cg_tol) << ' ' << s.cg_max_iters
      << ' ' << format_real(s.stop_tol) << '\n'
      << "denoise=" << (cfg.denoise_method == DenoiseMethod::DsgNlm ? "dsg" : "nlm") << ' '
      << cfg.oracle_crop << '\n'
      << "bench=" << cfg.bench.size << ' ' << cfg.bench.window_radius << ' ';
  for (int np : cfg.bench.patch_sides) out << np << ',';
  out << ' ' << cfg.bench.repeats << '\n';
  return out.str();
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

fs::path run_directory(const RunConfig& cfg) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_string(cfg))));
  return cfg.output_dir / (std::string(hex) + "-s" + std::to_string(cfg.seed));
}

}  // namespace lpnp::cli
