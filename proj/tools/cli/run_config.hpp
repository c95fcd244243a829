#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpnp/denoiser.hpp"
#include "lpnp/qis.hpp"
#include "lpnp/solver.hpp"
#include "lpnp/superres.hpp"

namespace lpnp::cli {

/// Bad configuration or unusable input; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProblemType { SuperRes, Qis };
enum class SolverKind { Linearized, StandardCg };
enum class DenoiseMethod { DsgNlm, Nlm };

struct SuperResSettings {
  int factor = 2;
  double blur_sigma = 1.5;
  int blur_radius = 5;
  Boundary boundary = Boundary::Periodic;
  double noise_sigma = 2.0 / 255.0;

  SuperResOp op() const;
};

struct BenchSettings {
  int size = 256;
  int window_radius = 21;
  std::vector<int> patch_sides{11, 17, 23, 29};
  int repeats = 3;
};

/// Fully resolved settings of one invocation: file contents, then flag
/// overrides, then defaults for anything left unset.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "runs";
  bool record_time = false;

  std::optional<std::filesystem::path> ground_truth;
  std::optional<std::filesystem::path> observation;
  std::optional<std::filesystem::path> ones;
  std::optional<std::filesystem::path> zeros;
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> guide;

  ProblemType problem = ProblemType::SuperRes;
  SuperResSettings superres;
  QisModel qis;
  double qis_epsilon = kQisEpsilon;

  int patch_side = 5;
  int window_radius = 5;
  std::optional<double> bandwidth;

  SolverKind solver = SolverKind::Linearized;
  SolverConfig solver_cfg;
  bool alpha_given = false;

  DenoiseMethod denoise_method = DenoiseMethod::DsgNlm;
  int oracle_crop = 16;

  BenchSettings bench;
};

/// "section.key" -> value pairs applied on top of the file.
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Reads the INI file (if any), applies overrides and validates every field
/// against the library invariants. Throws ConfigError; touches no files
/// other than the config itself.
RunConfig load_run_config(const std::string& command,
                          const std::optional<std::filesystem::path>& file,
                          const Overrides& overrides);

/// Stable text form of every resolved setting except the output location.
std::string canonical_string(const RunConfig& cfg);

std::uint64_t fnv1a64(const std::string& text);

/// output_dir / "<16 hex digits of the config hash>-s<seed>"
std::filesystem::path run_directory(const RunConfig& cfg);

}  // namespace lpnp::cli
