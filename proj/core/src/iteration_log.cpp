#include "lpnp/iteration_log.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "lpnp/error.hpp"

namespace lpnp {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_iteration_log_csv(std::ostream& out, const IterationLog& log, bool include_timing) {
  out << kIterationLogHeader << '\n';
  for (const IterationRecord& r : log) {
    out << r.iteration << ',' << format_real(r.primal) << ',' << format_real(r.dual) << ','
        << format_real(r.psnr) << ',' << format_real(include_timing ? r.time_ms : 0.0) << ','
        << format_real(r.objective) << '\n';
  }
}

void write_iteration_log_csv(const std::filesystem::path& path, const IterationLog& log,
                             bool include_timing) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoError::Kind::Write, "cannot open '" + path.string() + "' for writing");
  write_iteration_log_csv(out, log, include_timing);
  if (!out) throw IoError(IoError::Kind::Write, "failed writing '" + path.string() + "'");
}

}  // namespace lpnp
