#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "lpnp/solver.hpp"

namespace lpnp {

inline constexpr const char* kIterationLogHeader = "iter,primal,dual,psnr,time_ms,objective";

/// Shortest round-trip decimal form ("nan", "inf" for non-finite values).
std::string format_real(double v);

/// Writes the log as CSV with the fixed header, LF line endings and
/// dot decimals. With include_timing == false the time column is written as
/// 0 so that repeated runs produce identical bytes.
void write_iteration_log_csv(std::ostream& out, const IterationLog& log, bool include_timing = true);
void write_iteration_log_csv(const std::filesystem::path& path, const IterationLog& log,
                             bool include_timing = true);

}  // namespace lpnp
