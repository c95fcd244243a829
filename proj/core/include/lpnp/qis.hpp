#pragma once

#include <cstdint>

#include "lpnp/image.hpp"

namespace lpnp {

/// One-bit quanta image sensor: K jots per pixel, photon rate eta * x / K each.
struct QisModel {
  int oversampling = 16;  ///< K
  double gain = 16.0;     ///< eta
};

void validate(const QisModel& m);

/// Per-pixel jot statistics: `ones` holds K1 (fired), `zeros` holds K0,
/// with K0 + K1 = K.
struct QisCounts {
  Image ones;
  Image zeros;
};

/// Checks integrality, ranges and K0 + K1 = K.
void validate(const QisCounts& counts, const QisModel& m);

inline constexpr double kQisEpsilon = 1e-6;

/// Draws Poisson(eta * x_i / K) photons for each jot (pixels in raster order,
/// jots innermost) and thresholds at one photon. x is clamped to [0, 1].
QisCounts qis_simulate(const Image& x, const QisModel& m, std::uint64_t seed);

/// Negative log-likelihood sum_i K0_i a_i - K1_i log(1 - exp(-a_i)),
/// a_i = eta * max(x_i, epsilon) / K.
double qis_data_term(const Image& x, const QisCounts& counts, const QisModel& m,
                     double epsilon = kQisEpsilon);

/// Per-pixel derivative (eta/K) (K0 - K1 / (exp(a) - 1)) at max(x_i, epsilon).
Image qis_gradient(const Image& x, const QisCounts& counts, const QisModel& m,
                   double epsilon = kQisEpsilon);

}  // namespace lpnp
