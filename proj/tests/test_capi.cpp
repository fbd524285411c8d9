#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "wffd.h"

TEST_SUITE_BEGIN("capi");

TEST_CASE("constellation lifecycle and error reporting") {
  wffd_constellation* pam = nullptr;
  REQUIRE(wffd_constellation_pam(4, &pam) == WFFD_OK);
  CHECK(wffd_constellation_size(pam) == 4);
  CHECK(std::abs(wffd_constellation_variance(pam) - 1.0) <= 1e-12);
  CHECK(std::abs(wffd_constellation_mean(pam)) <= 1e-12);

  std::vector<double> pts(4), probs(4);
  REQUIRE(wffd_constellation_get(pam, pts.data(), probs.data()) == WFFD_OK);
  CHECK(pts[0] == doctest::Approx(-1.34164).epsilon(1e-5));
  wffd_constellation_free(pam);

  wffd_constellation* bad = nullptr;
  CHECK(wffd_constellation_pam(1, &bad) == WFFD_ERR_INVALID);
  CHECK(std::string(wffd_last_error()).find("m must be >= 2") != std::string::npos);
  CHECK(bad == nullptr);

  const double p2[] = {1.0, 0.5};
  const double w2[] = {0.5, 0.5};
  CHECK(wffd_constellation_create(p2, w2, 2, &bad) == WFFD_ERR_INVALID);
}

TEST_CASE("json round trip for constellation and fading") {
  wffd_constellation* c = nullptr;
  REQUIRE(wffd_constellation_from_json("{\"points\":[-1.0,1.0],\"probs\":[0.5,0.5]}", &c) ==
          WFFD_OK);
  char buf[256];
  size_t len = 0;
  REQUIRE(wffd_constellation_to_json(c, buf, sizeof(buf), &len) == WFFD_OK);
  CHECK(len > 0);
  wffd_constellation* c2 = nullptr;
  REQUIRE(wffd_constellation_from_json(buf, &c2) == WFFD_OK);
  CHECK(wffd_constellation_size(c2) == 2);
  wffd_constellation_free(c);
  wffd_constellation_free(c2);

  wffd_fading* f = nullptr;
  REQUIRE(wffd_fading_from_json(
              "{\"type\":\"uniform_interval\",\"mean\":2.0,\"half_width\":1.0}", &f) == WFFD_OK);
  CHECK(wffd_fading_mean(f) == doctest::Approx(2.0));
  wffd_fading* fs = nullptr;
  REQUIRE(wffd_fading_standardize(f, &fs) == WFFD_OK);
  CHECK(wffd_fading_variance(fs) == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(wffd_fading_to_json(fs, buf, sizeof(buf), &len) == WFFD_OK);
  CHECK(std::string(buf).find("uniform_interval") != std::string::npos);
  wffd_fading_free(f);
  wffd_fading_free(fs);

  CHECK(wffd_fading_from_json("{\"type\":\"nope\"}", &f) == WFFD_ERR_INVALID);
  CHECK(wffd_fading_from_json("not json", &f) == WFFD_ERR_INVALID);
}

TEST_CASE("numerics through the C surface") {
  const double means[] = {0.0};
  const double weights[] = {1.0};
  double bits = 0.0;
  REQUIRE(wffd_mixture_entropy(means, weights, 1, 1.0, 0.0, &bits) == WFFD_OK);
  CHECK(bits == doctest::Approx(2.04709558518).epsilon(1e-8));
  const double pmf[] = {0.5, 0.25, 0.25};
  REQUIRE(wffd_discrete_entropy(pmf, 3, &bits) == WFFD_OK);
  CHECK(bits == doctest::Approx(1.5));
  CHECK(wffd_std_normal_cdf(0.0) == doctest::Approx(0.5));
}

TEST_CASE("rates, conditions, and sim through the C surface") {
  wffd_constellation* state = nullptr;
  REQUIRE(wffd_constellation_pam(2, &state) == WFFD_OK);
  wffd_fading* fading = nullptr;
  REQUIRE(wffd_fading_degenerate(1.0, &fading) == WFFD_OK);
  const wffd_channel_params params{4.0, 20.0};

  double cap = 0.0;
  REQUIRE(wffd_awgn_capacity(10.0, &cap) == WFFD_OK);
  CHECK(cap == doctest::Approx(1.7297158).epsilon(1e-6));
  CHECK(wffd_awgn_capacity(-2.0, &cap) == WFFD_ERR_INVALID);

  wffd_rate_options opts;
  wffd_default_rate_options(&opts);
  wffd_rate_result rate{};
  REQUIRE(wffd_state_amplification_rate(params, state, fading, WFFD_MODE_NCSI, &opts, &rate) ==
          WFFD_OK);
  CHECK(std::strlen(rate.method) > 0);

  wffd_rate_result bound{};
  double additive = 0.0;
  wffd_condition_report cond{};
  REQUIRE(wffd_outer_bound(params, state, fading, WFFD_MODE_NCSI, &opts, &bound, &additive,
                           &cond) == WFFD_OK);
  CHECK(additive == 4.0);
  CHECK(std::abs(bound.rate - rate.rate - 4.0) <= 1e-12);
  CHECK(cond.satisfied == 1);
  CHECK(cond.min_gap == doctest::Approx(36.0));

  CHECK(wffd_state_amplification_rate(params, state, fading, 99, &opts, &rate) ==
        WFFD_ERR_INVALID);

  wffd_sim_config sim_cfg{};
  sim_cfg.n_symbols = 10000;
  sim_cfg.seed = 3;
  sim_cfg.noise_mode = WFFD_NOISE_RESIDUAL;
  sim_cfg.mode = WFFD_MODE_RCSI;
  sim_cfg.jobs = 1;
  wffd_constellation* xc = nullptr;
  const double xpts[] = {-2.0, -1.0, 0.0, 1.0, 2.0};
  const double xprobs[] = {0.2, 0.2, 0.2, 0.2, 0.2};
  REQUIRE(wffd_constellation_create(xpts, xprobs, 5, &xc) == WFFD_OK);
  wffd_sim_result sim_res{};
  REQUIRE(wffd_run_decoding_sim(&sim_cfg, params, xc, state, fading, &sim_res) == WFFD_OK);
  CHECK(sim_res.joint_errors == 0);
  CHECK(sim_res.n == 10000);

  double lo[] = {0.0, 2.0};
  double hi[] = {1.0, 3.0};
  double gap = 0.0;
  REQUIRE(wffd_min_region_gap(lo, hi, 2, &gap) == WFFD_OK);
  CHECK(gap == doctest::Approx(1.0));

  size_t count = 0;
  REQUIRE(wffd_pam_uniform_regions(params, 20.0, 2, 1.0, nullptr, 0, &count) == WFFD_OK);
  CHECK(count == 10);
  CHECK(wffd_pam_uniform_regions(params, 20.0, 3, 1.0, nullptr, 0, &count) ==
        WFFD_ERR_UNSUPPORTED);
  std::vector<wffd_region> regions(count);
  REQUIRE(wffd_pam_uniform_regions(params, 20.0, 2, 1.0, regions.data(), count, &count) ==
          WFFD_OK);
  CHECK(regions[0].lo <= regions[0].hi);

  CHECK(wffd_rho_z(1) == doctest::Approx(0.17467).epsilon(1e-4));
  CHECK(wffd_quantized_noise_entropy() <= 4.0);
  wffd_gap_breakdown gb{};
  REQUIRE(wffd_gap_breakdown_get(WFFD_MODE_RCSI, &gb) == WFFD_OK);
  CHECK(gb.total_claimed == 6.0);

  wffd_constellation_free(xc);
  wffd_constellation_free(state);
  wffd_fading_free(fading);
}

TEST_CASE("rate scans and identity through the C surface") {
  wffd_constellation* state = nullptr;
  REQUIRE(wffd_constellation_pam(2, &state) == WFFD_OK);
  wffd_fading* fading = nullptr;
  REQUIRE(wffd_fading_degenerate(1.0, &fading) == WFFD_OK);
  const wffd_channel_params params{10.0, 2.0};

  wffd_rate_options opts;
  wffd_default_rate_options(&opts);
  opts.fading_samples = 1000;

  wffd_rate_result costa{};
  REQUIRE(wffd_costa_mismatch_rate(wffd_channel_params{10.0, 5.0}, 1.0, state, &opts,
                                   &costa) == WFFD_OK);
  CHECK(std::abs(costa.rate - 1.7297158) <= 2e-3);
  CHECK(wffd_costa_mismatch_rate(wffd_channel_params{10.0, 5.0}, 1.0, state, &opts,
                                 nullptr) == WFFD_ERR_INVALID);

  const double alphas[] = {0.9, 1.0};
  wffd_rate_result per[2];
  size_t best = 99;
  REQUIRE(wffd_linear_cancel_scan(params, state, fading, alphas, 2, &opts, per, &best) ==
          WFFD_OK);
  CHECK(best < 2);
  wffd_rate_result gauss{};
  REQUIRE(wffd_no_csit_gaussian_rate(params, state, fading, &opts, &gauss) == WFFD_OK);
  CHECK(per[1].rate == doctest::Approx(gauss.rate).epsilon(1e-12));

  double lhs = 0.0, rhs = 0.0;
  REQUIRE(wffd_identity_residual(params, state, fading, &opts, &lhs, &rhs) == WFFD_OK);
  CHECK(std::abs(lhs - rhs) <= 3e-3);

  wffd_quantizer_entropy_terms terms{};
  wffd_quantized_noise_entropy_terms(&terms);
  CHECK(terms.total == doctest::Approx(wffd_quantized_noise_entropy()).epsilon(1e-12));
  CHECK(terms.tail_over_covered == 1);

  wffd_constellation_free(state);
  wffd_fading_free(fading);
}

TEST_CASE("sample block through the C surface") {
  wffd_constellation* state = nullptr;
  REQUIRE(wffd_constellation_pam(2, &state) == WFFD_OK);
  wffd_fading* fading = nullptr;
  REQUIRE(wffd_fading_uniform(1.0, 0.5, &fading) == WFFD_OK);
  const std::vector<double> x(64, 0.0);
  std::vector<double> y(64), a(64), s(64);
  const wffd_channel_params params{1.0, 2.0};
  REQUIRE(wffd_sample_block(params, state, fading, x.data(), x.size(), WFFD_NOISE_RESIDUAL, 9,
                            y.data(), a.data(), s.data()) == WFFD_OK);
  for (size_t i = 0; i < x.size(); ++i)
    CHECK(std::abs(y[i] - 2.0 * a[i] * s[i]) <= 0.25 + 1e-12);
  CHECK(wffd_sample_block(params, state, fading, x.data(), x.size(), 7, 9, y.data(), a.data(),
                          s.data()) == WFFD_ERR_INVALID);
  wffd_constellation_free(state);
  wffd_fading_free(fading);
}

TEST_SUITE_END();
