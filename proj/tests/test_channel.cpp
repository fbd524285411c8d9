#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wffd/channel.hpp"

using namespace wffd;

TEST_SUITE_BEGIN("channel");

TEST_CASE("2-PAM is {-1, +1}") {
  const Constellation c = make_pam(2);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(c.points[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c.probs[0] == doctest::Approx(0.5));
  CHECK(c.probs[1] == doctest::Approx(0.5));
}

TEST_CASE("4-PAM points") {
  const Constellation c = make_pam(4);
  REQUIRE(c.points.size() == 4);
  CHECK(c.points[0] == doctest::Approx(-1.34164).epsilon(1e-5));
  CHECK(c.points[1] == doctest::Approx(-0.44721).epsilon(1e-5));
  CHECK(c.points[2] == doctest::Approx(0.44721).epsilon(1e-5));
  CHECK(c.points[3] == doctest::Approx(1.34164).epsilon(1e-5));
  CHECK(c.variance() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("every pam size is zero-mean unit-variance with m points") {
  for (int m = 2; m <= 64; ++m) {
    const Constellation c = make_pam(m);
    CHECK(c.points.size() == static_cast<std::size_t>(m));
    CHECK_NOTHROW(c.validate());
    CHECK(std::abs(c.mean()) <= 1e-12);
    CHECK(c.variance() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(make_pam(1), std::invalid_argument);
}

TEST_CASE("standardize constellation") {
  const Constellation raw{{0.0, 2.0}, {0.5, 0.5}};
  const Constellation std_c = standardize(raw);
  CHECK(std_c.points[0] == doctest::Approx(-1.0));
  CHECK(std_c.points[1] == doctest::Approx(1.0));

  const Constellation degenerate_var{{1.0}, {1.0}};
  CHECK_THROWS_AS(standardize(degenerate_var), std::invalid_argument);
}

TEST_CASE("standardize uniform fading scales half_width to sqrt(3)") {
  const double k = 3.0;
  const FadingModel raw = FadingModel::uniform(2.0, 2.0 * std::sqrt(3.0) * k);
  const FadingModel out = standardize(raw);
  const auto& u = std::get<UniformInterval>(out.law);
  CHECK(u.half_width == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(u.mean == doctest::Approx(1.0 / k).epsilon(1e-12));
  CHECK(out.variance() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("standardize is idempotent") {
  const FadingModel raw = FadingModel::discrete(Constellation{{0.0, 1.0, 5.0}, {0.3, 0.4, 0.3}});
  const FadingModel once = standardize(raw);
  const FadingModel twice = standardize(once);
  const auto& a = once.discrete_law();
  const auto& b = twice.discrete_law();
  for (std::size_t i = 0; i < a.points.size(); ++i)
    CHECK(std::abs(a.points[i] - b.points[i]) <= 1e-12);

  const Constellation pam = make_pam(2);
  const Constellation again = standardize(pam);
  CHECK(again.points[0] == doctest::Approx(pam.points[0]).epsilon(1e-14));
  CHECK(again.points[1] == doctest::Approx(pam.points[1]).epsilon(1e-14));

  const FadingModel gauss = standardize(FadingModel::gaussian(3.0, 4.0));
  CHECK(std::get<GaussianLaw>(gauss.law).mean == doctest::Approx(1.5));
  CHECK(std::get<GaussianLaw>(gauss.law).variance == doctest::Approx(1.0));
}

TEST_CASE("sample_block gaussian moments at c = 0") {
  const std::vector<double> x(100000, 0.0);
  const BlockSample block = sample_block(ChannelParams{1.0, 0.0}, make_pam(2),
                                         FadingModel::degenerate(1.0), x,
                                         NoiseMode::kGaussian, 99);
  double mean = 0.0, second = 0.0;
  for (double y : block.y) {
    mean += y;
    second += y * y;
  }
  mean /= static_cast<double>(block.y.size());
  second /= static_cast<double>(block.y.size());
  const double n = static_cast<double>(block.y.size());
  CHECK(std::abs(mean) <= 3.0 / std::sqrt(n));
  CHECK(std::abs(second - mean * mean - 1.0) <= 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("residual mode bounds the noise by 1/4") {
  const std::vector<double> x(50000, 0.0);
  const ChannelParams params{1.0, 3.0};
  const Constellation state = make_pam(2);
  const FadingModel fading = FadingModel::degenerate(1.0);
  const BlockSample block = sample_block(params, state, fading, x, NoiseMode::kResidual, 5);
  for (std::size_t i = 0; i < block.y.size(); ++i) {
    const double z = block.y[i] - x[i] - params.c * block.a[i] * block.s[i];
    CHECK(std::abs(z) <= 0.25 + 1e-12);
  }
}

TEST_CASE("residual_noise maps samples into [-1/4, 1/4]") {
  for (double z : {0.0, 0.2, 0.26, 0.74, -0.26, 1.3, -2.49, 0.25}) {
    CHECK(std::abs(residual_noise(z)) <= 0.25 + 1e-15);
    // the removed part is a half-integer
    const double removed = z - residual_noise(z);
    CHECK(std::abs(removed * 2.0 - std::round(removed * 2.0)) <= 1e-12);
  }
}

TEST_CASE("fixed seed reproduces the block exactly") {
  const std::vector<double> x{0.0, 1.0, -1.0, 2.0};
  const ChannelParams params{4.0, 2.0};
  const FadingModel fading = FadingModel::uniform(1.0, 0.5);
  const BlockSample b1 = sample_block(params, make_pam(4), fading, x, NoiseMode::kGaussian, 17);
  const BlockSample b2 = sample_block(params, make_pam(4), fading, x, NoiseMode::kGaussian, 17);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(b1.y[i] == b2.y[i]);
    CHECK(b1.a[i] == b2.a[i]);
    CHECK(b1.s[i] == b2.s[i]);
  }
  const BlockSample b3 = sample_block(params, make_pam(4), fading, x, NoiseMode::kGaussian, 18);
  bool any_diff = false;
  for (std::size_t i = 0; i < x.size(); ++i) any_diff = any_diff || (b1.y[i] != b3.y[i]);
  CHECK(any_diff);
}

TEST_CASE("dirt term empirical moments match c^2 E[A^2]") {
  const double c = 2.0;
  const FadingModel fading = FadingModel::uniform(1.5, std::sqrt(3.0));
  const double e_a2 = fading.variance() + fading.mean() * fading.mean();
  const std::vector<double> x(1000000, 0.0);
  const ChannelParams params{1.0, c};
  const BlockSample block = sample_block(params, make_pam(2), fading, x, NoiseMode::kGaussian, 3);
  double mean = 0.0, second = 0.0;
  for (std::size_t i = 0; i < block.y.size(); ++i) {
    const double dirt = c * block.a[i] * block.s[i];
    mean += dirt;
    second += dirt * dirt;
  }
  const double n = static_cast<double>(block.y.size());
  mean /= n;
  second /= n;
  const double target_var = c * c * e_a2;
  // dirt is bounded by c*(mu+w)*|s|, fourth moment finite; 4 crude SEs
  CHECK(std::abs(mean) <= 4.0 * std::sqrt(target_var / n));
  CHECK(std::abs(second - target_var) <= 4.0 * target_var * 2.0 / std::sqrt(n));
}

TEST_CASE("sample_block rejects non-finite inputs") {
  const std::vector<double> x{0.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(sample_block(ChannelParams{1.0, 1.0}, make_pam(2),
                               FadingModel::degenerate(1.0), x, NoiseMode::kGaussian, 1),
                  std::invalid_argument);
}

TEST_CASE("constellation validation") {
  CHECK_THROWS_AS(Constellation({{1.0, 1.0}, {0.5, 0.5}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Constellation({{0.0, 1.0}, {0.6, 0.6}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(Constellation({{0.0}, {1.0, 0.0}}).validate(), std::invalid_argument);
  CHECK_NOTHROW(make_pam(6).validate());
}

TEST_SUITE_END();
