#include "lpnp/qis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lpnp/error.hpp"
#include "lpnp/rng.hpp"

namespace lpnp {

void validate(const QisModel& m) {
  if (m.oversampling < 1) throw InvalidArgument("QIS oversampling K must be >= 1");
  if (!(m.gain > 0.0) || !std::isfinite(m.gain)) throw InvalidArgument("QIS gain must be positive");
}

void validate(const QisCounts& counts, const QisModel& m) {
  validate(m);
  require_same_shape(counts.ones, counts.zeros, "QIS counts");
  const double k = m.oversampling;
  const auto ones = counts.ones.data();
  const auto zeros = counts.zeros.data();
  for (std::size_t i = 0; i < ones.size(); ++i) {
    const double k1 = ones[i];
    const double k0 = zeros[i];
    if (k1 != std::floor(k1) || k0 != std::floor(k0) || k1 < 0 || k0 < 0 || k0 + k1 != k) {
      throw InvalidArgument("QIS counts at index " + std::to_string(i) +
                            " are not nonnegative integers summing to K=" +
                            std::to_string(m.oversampling));
    }
  }
}

QisCounts qis_simulate(const Image& x, const QisModel& m, std::uint64_t seed) {
  validate(m);
  Rng rng(seed);
  QisCounts counts{Image(x.width(), x.height()), Image(x.width(), x.height())};
  const auto in = x.data();
  auto ones = counts.ones.data();
  auto zeros = counts.zeros.data();
  const double per_jot = m.gain / m.oversampling;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double rate = per_jot * std::clamp(in[i], 0.0, 1.0);
    int fired = 0;
    for (int jot = 0; jot < m.oversampling; ++jot) {
      if (rng.poisson(rate) >= 1) ++fired;
    }
    ones[i] = fired;
    zeros[i] = m.oversampling - fired;
  }
  return counts;
}

double qis_data_term(const Image& x, const QisCounts& counts, const QisModel& m, double epsilon) {
  validate(m);
  require_same_shape(x, counts.ones, "qis_data_term");
  require_same_shape(x, counts.zeros, "qis_data_term");
  const double per_jot = m.gain / m.oversampling;
  const auto in = x.data();
  const auto ones = counts.ones.data();
  const auto zeros = counts.zeros.data();
  double f = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double a = per_jot * std::max(in[i], epsilon);
    // -log(1 - e^{-a}) written with expm1 to stay accurate for small a
    f += zeros[i] * a - ones[i] * std::log(-std::expm1(-a));
  }
  return f;
}

Image qis_gradient(const Image& x, const QisCounts& counts, const QisModel& m, double epsilon) {
  validate(m);
  require_same_shape(x, counts.ones, "qis_gradient");
  require_same_shape(x, counts.zeros, "qis_gradient");
  const double per_jot = m.gain / m.oversampling;
  Image g(x.width(), x.height());
  const auto in = x.data();
  const auto ones = counts.ones.data();
  const auto zeros = counts.zeros.data();
  auto out = g.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double a = per_jot * std::max(in[i], epsilon);
    out[i] = per_jot * (zeros[i] - ones[i] / std::expm1(a));
  }
  return g;
}

}  // namespace lpnp
