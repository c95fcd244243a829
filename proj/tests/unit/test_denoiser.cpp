#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lpnp/dense_weights.hpp"
#include "lpnp/denoiser.hpp"
#include "lpnp/error.hpp"
#include "oracles.hpp"

using namespace lpnp;
using lpnp::testing::random_image;
using lpnp::testing::to_image;
using lpnp::testing::to_vector;

namespace {

Eigen::MatrixXd to_matrix(const DenseWeights& w) {
  const auto n = static_cast<Eigen::Index>(w.dimension());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = w(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return m;
}

PatchParams params(int np, int ns, double sigma) {
  PatchParams p;
  p.patch_side = np;
  p.window_radius = ns;
  p.bandwidth = sigma;
  return p;
}

}  // namespace

TEST_CASE("patch params validation") {
  CHECK_NOTHROW(validate(params(1, 1, 0.1)));
  CHECK_THROWS_AS(validate(params(4, 2, 0.1)), InvalidArgument);
  CHECK_THROWS_AS(validate(params(3, 0, 0.1)), InvalidArgument);
  CHECK_THROWS_AS(validate(params(3, 2, 0.0)), InvalidArgument);
}

TEST_CASE("nlm_kernel") {
  const PatchParams p = params(5, 3, 0.2);
  const Image guide = random_image(12, 10, 4);
  CHECK(nlm_kernel(guide, {3, 4}, {3, 4}, p) == 1.0);
  CHECK(nlm_kernel(Image(6, 6, 0.3), {0, 0}, {5, 5}, p) == 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Pixel s{trial % 10, (trial * 7) % 12};
    const Pixel r{(trial * 3) % 10, (trial * 5) % 12};
    const double ssd =
        lpnp::testing::direct_patch_ssd(guide, s, Offset{r.row - s.row, r.col - s.col}, 5);
    const double expect = std::exp(-ssd / (2.0 * 25.0 * 0.04));
    const double got = nlm_kernel(guide, s, r, p);
    CHECK(std::abs(got - expect) <= 1e-12);
    CHECK(got == nlm_kernel(guide, r, s, p));
    CHECK(got > 0.0);
    CHECK(got <= 1.0);
  }
}

TEST_CASE("patch_distance_map") {
  SUBCASE("zero offset and constant guide give zeros") {
    const PatchParams p = params(5, 3, 0.1);
    const Image zero = patch_distance_map(random_image(9, 8, 2), Offset{0, 0}, p);
    CHECK(max_value(zero) == 0.0);
    CHECK(min_value(zero) == 0.0);
    const Image flat = patch_distance_map(Image(9, 8, 0.4), Offset{2, -3}, p);
    CHECK(max_abs_diff(flat, Image(9, 8, 0.0)) == 0.0);
  }
  SUBCASE("offset outside the window is rejected") {
    CHECK_THROWS_AS(patch_distance_map(Image(8, 8), Offset{0, 4}, params(3, 3, 0.1)),
                    InvalidArgument);
  }
  SUBCASE("matches the direct patch loop") {
    std::mt19937_64 gen(17);
    const Image guide = random_image(32, 32, 7);
    for (int np : {3, 7, 11}) {
      const PatchParams p = params(np, 6, 0.1);
      for (int trial = 0; trial < 8; ++trial) {
        const Offset t{static_cast<int>(gen() % 13) - 6, static_cast<int>(gen() % 13) - 6};
        const Image map = patch_distance_map(guide, t, p);
        for (int r = 0; r < 32; ++r) {
          for (int c = 0; c < 32; ++c) {
            const double expect = lpnp::testing::direct_patch_ssd(guide, {r, c}, t, np);
            REQUIRE(std::abs(map(r, c) - expect) <= 1e-9 * std::max(expect, 1e-300));
          }
        }
      }
    }
  }
  SUBCASE("works when the padding wraps around a tiny image") {
    const Image guide = random_image(3, 2, 9);
    const PatchParams p = params(5, 1, 0.1);
    const Offset t{1, -1};
    const Image map = patch_distance_map(guide, t, p);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 3; ++c)
        CHECK(map(r, c) ==
              doctest::Approx(lpnp::testing::direct_patch_ssd(guide, {r, c}, t, 5)).epsilon(1e-12));
  }
}

TEST_CASE("hat_weight") {
  CHECK(hat_weight({4, 4}, {4, 4}, 10) == 1.0);
  CHECK(hat_weight({0, 0}, {10, 0}, 10) == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
  CHECK(hat_weight({0, 0}, {10, 10}, 10) == doctest::Approx(1.0 / 121.0).epsilon(1e-15));
  CHECK(hat_weight({3, 1}, {1, 2}, 3) == hat_weight({1, 2}, {3, 1}, 3));
  CHECK_THROWS_AS(hat_weight({0, 0}, {0, 4}, 3), InvalidArgument);
}

TEST_CASE("nlm_denoise") {
  SUBCASE("constant input stays constant") {
    const Image out = nlm_denoise(Image(10, 9, 0.37), random_image(10, 9, 1), params(3, 2, 0.1));
    for (double v : out.data()) CHECK(v == doctest::Approx(0.37).epsilon(1e-14));
  }
  SUBCASE("tiny bandwidth returns the input") {
    const Image img = random_image(12, 12, 3);
    const Image out = nlm_denoise(img, img, params(3, 3, 1e-9));
    CHECK(max_abs_diff(out, img) < 1e-6);
  }
  SUBCASE("matches the dense row-stochastic oracle") {
    const PatchParams p = params(5, 3, 0.15);
    const Image img = random_image(16, 16, 21);
    const Image out = nlm_denoise(img, img, p);
    const Eigen::VectorXd expect = lpnp::testing::dense_nlm_matrix(img, p) * to_vector(img);
    CHECK(max_abs_diff(out, to_image(expect, 16, 16)) <= 1e-10);
  }
  SUBCASE("output respects the input range") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Image in = random_image(11, 13, seed, -0.3, 0.8);
      const Image guide = random_image(11, 13, seed + 50);
      const Image out = nlm_denoise(in, guide, params(3, 4, 0.3));
      CHECK(min_value(out) >= min_value(in) - 1e-14);
      CHECK(max_value(out) <= max_value(in) + 1e-14);
    }
  }
  CHECK_THROWS_AS(nlm_denoise(Image(4, 4), Image(4, 5), params(3, 1, 0.1)), DimensionMismatch);
}

TEST_CASE("dense weights: hand-derived examples") {
  SUBCASE("1x1") {
    const DenseWeights w = build_dense_weights(Image(1, 1, 0.2), params(1, 1, 0.1));
    REQUIRE(w.dimension() == 1);
    CHECK(w(0, 0) == 1.0);
  }
  SUBCASE("1x2 constant") {
    const DenseWeights w = build_dense_weights(Image(2, 1, 0.5), params(1, 1, 0.1));
    CHECK(w(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(w(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(w(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(w(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  CHECK_THROWS_AS(build_dense_weights(Image(65, 64), params(3, 1, 0.1)), InvalidArgument);
}

TEST_CASE("dense weights agree with an independent Eigen construction") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const PatchParams p = params(3, 2, 0.2);
    const Image guide = random_image(7, 6, seed);
    const Eigen::MatrixXd got = to_matrix(build_dense_weights(guide, p));
    const Eigen::MatrixXd expect = lpnp::testing::dense_dsg_matrix(guide, p);
    CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("dense weights invariants") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const int np = seed % 2 == 0 ? 3 : 5;
    const int ns = 2 + static_cast<int>(seed % 3);
    const Image guide = random_image(6 + static_cast<int>(seed), 6, seed + 100);
    const Eigen::MatrixXd w = to_matrix(build_dense_weights(guide, params(np, ns, 0.15)));
    CHECK((w - w.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((w.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
    CHECK((w.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
    CHECK(w.minCoeff() >= -1e-14);
    const Eigen::VectorXd ev = lpnp::testing::symmetric_eigenvalues(w);
    CHECK(ev.minCoeff() >= -1e-10);
    CHECK(ev.maxCoeff() <= 1.0 + 1e-10);
  }
}

TEST_CASE("dsg_nlm_denoise") {
  SUBCASE("constant input is preserved") {
    const Image out =
        dsg_nlm_denoise(Image(9, 7, 0.61), random_image(9, 7, 8), params(3, 2, 0.1));
    for (double v : out.data()) CHECK(v == doctest::Approx(0.61).epsilon(1e-14));
  }
  SUBCASE("1x2 example") {
    const Image in(2, 1, std::vector<double>{0.9, 0.3});
    const Image out = dsg_nlm_denoise(in, Image(2, 1, 0.5), params(1, 1, 0.1));
    CHECK(out(0, 0) == doctest::Approx((2 * 0.9 + 0.3) / 3).epsilon(1e-15));
    CHECK(out(0, 1) == doctest::Approx((0.9 + 2 * 0.3) / 3).epsilon(1e-15));
  }
  SUBCASE("1x1 example") {
    const Image out = dsg_nlm_denoise(Image(1, 1, 0.42), Image(1, 1, 0.1), params(3, 1, 0.1));
    CHECK(out(0, 0) == 0.42);
  }
  SUBCASE("equals the dense matrix product") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const int w = 8 + static_cast<int>(seed % 5);
      const int h = 8 + static_cast<int>((seed * 3) % 5);
      const PatchParams p = params(seed % 2 == 0 ? 3 : 5, 2 + static_cast<int>(seed % 2), 0.2);
      const Image guide = random_image(w, h, seed);
      const Image in = random_image(w, h, seed + 1000);
      const DenseWeights dense = build_dense_weights(guide, p);
      REQUIRE(max_abs_diff(dsg_nlm_denoise(in, guide, p), dense.apply(in)) <= 1e-10);
    }
  }
  SUBCASE("preserves the mean") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Image in = random_image(20, 17, seed, 0.1, 1.0);
      const Image out = dsg_nlm_denoise(in, in, params(5, 4, 0.2));
      CHECK(std::abs(mean(out) - mean(in)) <= 1e-10 * mean(in));
    }
  }
  SUBCASE("brute force agrees") {
    for (int np : {1, 3, 7}) {
      const Image img = random_image(15, 11, static_cast<std::uint64_t>(np));
      const PatchParams p = params(np, 3, 0.25);
      CHECK(max_abs_diff(dsg_nlm_denoise(img, img, p), dsg_nlm_denoise_brute_force(img, img, p)) <=
            1e-12);
    }
  }
  SUBCASE("repeatable bit for bit") {
    const Image img = random_image(24, 19, 77);
    const PatchParams p = params(5, 3, 0.1);
    CHECK(dsg_nlm_denoise(img, img, p) == dsg_nlm_denoise(img, img, p));
  }
  CHECK_THROWS_AS(dsg_nlm_denoise(Image(4, 4), Image(5, 4), params(3, 1, 0.1)), DimensionMismatch);
}

TEST_CASE("frozen guide") {
  const PatchParams p = params(3, 2, 0.15);
  const Image guide = random_image(10, 9, 31);
  const FrozenGuide frozen = freeze_guide(guide, p);

  SUBCASE("denoising the guide itself") {
    CHECK(max_abs_diff(frozen.apply(guide), dsg_nlm_denoise(guide, guide, p)) <= 1e-15);
  }
  SUBCASE("linear in the input") {
    const Image u = random_image(10, 9, 1);
    const Image w = random_image(10, 9, 2);
    const double a = 0.7;
    const double b = -1.3;
    const Image lhs = frozen.apply(a * u + b * w);
    const Image rhs = a * frozen.apply(u) + b * frozen.apply(w);
    CHECK(max_abs_diff(lhs, rhs) <= 1e-10);
  }
  SUBCASE("applied twice equals W squared") {
    const Image x = random_image(10, 9, 3);
    const Eigen::MatrixXd w = lpnp::testing::dense_dsg_matrix(guide, p);
    const Eigen::VectorXd expect = w * (w * to_vector(x));
    CHECK(max_abs_diff(frozen.apply(frozen.apply(x)), to_image(expect, 10, 9)) <= 1e-10);
  }
  SUBCASE("guide is a snapshot") {
    Image g = random_image(6, 6, 5);
    const FrozenGuide f(g, p);
    const Image before = f.apply(g);
    g(0, 0) += 1.0;
    CHECK(f.guide()(0, 0) != g(0, 0));
    CHECK_THROWS_AS(f.apply(Image(5, 6)), DimensionMismatch);
    (void)before;
  }
}
