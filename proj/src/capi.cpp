#include "wffd.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include <json.hpp>

#include "wffd/channel.hpp"
#include "wffd/gap_constants.hpp"
#include "wffd/geometry.hpp"
#include "wffd/numerics.hpp"
#include "wffd/rates.hpp"
#include "wffd/sim.hpp"

using nlohmann::json;

struct wffd_constellation {
  wffd::Constellation impl;
};

struct wffd_fading {
  wffd::FadingModel impl;
};

namespace {

thread_local std::string g_last_error;

void copy_str(char* dst, size_t cap, const std::string& src) {
  if (cap == 0) return;
  const size_t n = std::min(cap - 1, src.size());
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

int fail(int code, const std::string& message) {
  g_last_error = message;
  return code;
}

// Runs fn(), translating exceptions into error codes.
template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return WFFD_OK;
  } catch (const wffd::ConvergenceError& e) {
    return fail(WFFD_ERR_CONVERGENCE, e.what());
  } catch (const wffd::UnsupportedModelError& e) {
    return fail(WFFD_ERR_UNSUPPORTED, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(WFFD_ERR_INVALID, e.what());
  } catch (const json::exception& e) {
    return fail(WFFD_ERR_INVALID, e.what());
  } catch (const std::bad_alloc&) {
    return fail(WFFD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WFFD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WFFD_ERR_INTERNAL, "unknown error");
  }
}

wffd::ChannelParams to_params(wffd_channel_params p) {
  wffd::ChannelParams out{p.P, p.c};
  out.validate();
  return out;
}

wffd::RateOptions to_options(const wffd_rate_options* opts) {
  wffd::RateOptions out;
  if (opts == nullptr) return out;
  if (opts->quad_abs_tol > 0.0) out.quad.abs_tol = opts->quad_abs_tol;
  if (opts->nested_tol > 0.0) out.nested_tol = opts->nested_tol;
  if (opts->max_subdivisions > 0) out.quad.max_subdivisions = opts->max_subdivisions;
  if (opts->mc_budget > 0) out.mc_budget = opts->mc_budget;
  if (opts->fading_samples > 0) out.fading_samples = opts->fading_samples;
  if (opts->batches > 0) out.batches = opts->batches;
  if (opts->seed != 0) out.seed = opts->seed;
  switch (opts->method) {
    case WFFD_METHOD_QUADRATURE:
      out.method = wffd::RateMethod::kQuadrature;
      break;
    case WFFD_METHOD_MONTE_CARLO:
      out.method = wffd::RateMethod::kMonteCarlo;
      break;
    case WFFD_METHOD_AUTO:
      out.method = wffd::RateMethod::kAuto;
      break;
    default:
      throw std::invalid_argument("unknown rate method");
  }
  return out;
}

wffd::CsiMode to_mode(int mode) {
  if (mode == WFFD_MODE_NCSI) return wffd::CsiMode::kNcsi;
  if (mode == WFFD_MODE_RCSI) return wffd::CsiMode::kRcsi;
  throw std::invalid_argument("mode must be WFFD_MODE_NCSI or WFFD_MODE_RCSI");
}

wffd::NoiseMode to_noise(int mode) {
  if (mode == WFFD_NOISE_GAUSSIAN) return wffd::NoiseMode::kGaussian;
  if (mode == WFFD_NOISE_RESIDUAL) return wffd::NoiseMode::kResidual;
  throw std::invalid_argument("noise_mode must be gaussian or residual");
}

void fill_rate_result(const wffd::RateResult& in, wffd_rate_result* out) {
  out->rate = in.rate;
  out->numeric_error = in.numeric_error;
  out->samples_used = in.samples_used;
  out->negative = in.negative ? 1 : 0;
  copy_str(out->method, sizeof(out->method), in.method);
  copy_str(out->note, sizeof(out->note), in.note);
}

void fill_condition(const wffd::ConditionReport& in, wffd_condition_report* out) {
  out->min_gap = in.min_gap;
  out->satisfied = in.satisfied ? 1 : 0;
  out->witness_i = in.witness.i;
  out->witness_s = in.witness.s;
  out->witness_a = in.witness.a;
  out->witness_s_tilde = in.witness.s_tilde;
  out->witness_a_tilde = in.witness.a_tilde;
  out->mode = in.mode == wffd::CsiMode::kNcsi ? WFFD_MODE_NCSI : WFFD_MODE_RCSI;
  copy_str(out->note, sizeof(out->note), in.note);
}

json constellation_to_json_obj(const wffd::Constellation& c) {
  return json{{"points", c.points}, {"probs", c.probs}};
}

wffd::Constellation constellation_from_json_obj(const json& j) {
  wffd::Constellation c;
  c.points = j.at("points").get<std::vector<double>>();
  c.probs = j.at("probs").get<std::vector<double>>();
  c.validate();
  return c;
}

json fading_to_json_obj(const wffd::FadingModel& f) {
  if (f.is_discrete()) {
    const auto& law = f.discrete_law();
    return json{{"type", "discrete_pmf"}, {"points", law.points}, {"probs", law.probs}};
  }
  if (const auto* u = std::get_if<wffd::UniformInterval>(&f.law))
    return json{{"type", "uniform_interval"}, {"mean", u->mean}, {"half_width", u->half_width}};
  const auto& g = std::get<wffd::GaussianLaw>(f.law);
  return json{{"type", "gaussian_law"}, {"mean", g.mean}, {"variance", g.variance}};
}

wffd::FadingModel fading_from_json_obj(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "discrete_pmf") {
    wffd::Constellation c;
    c.points = j.at("points").get<std::vector<double>>();
    c.probs = j.at("probs").get<std::vector<double>>();
    return wffd::FadingModel::discrete(std::move(c));
  }
  if (type == "uniform_interval")
    return wffd::FadingModel::uniform(j.at("mean").get<double>(),
                                      j.at("half_width").get<double>());
  if (type == "gaussian_law")
    return wffd::FadingModel::gaussian(j.at("mean").get<double>(),
                                       j.at("variance").get<double>());
  throw std::invalid_argument("fading: unknown type '" + type + "'");
}

int emit_json(const json& j, char* buf, size_t cap, size_t* len) {
  const std::string text = j.dump();
  if (len != nullptr) *len = text.size();
  if (buf == nullptr) return WFFD_OK;
  if (cap <= text.size())
    return fail(WFFD_ERR_INVALID, "buffer too small for JSON output");
  std::memcpy(buf, text.data(), text.size());
  buf[text.size()] = '\0';
  return WFFD_OK;
}

}  // namespace

extern "C" {

const char* wffd_last_error(void) { return g_last_error.c_str(); }

const char* wffd_error_name(int code) {
  switch (code) {
    case WFFD_OK: return "ok";
    case WFFD_ERR_INVALID: return "invalid-input";
    case WFFD_ERR_CONVERGENCE: return "convergence-failure";
    case WFFD_ERR_UNSUPPORTED: return "unsupported-model";
    default: return "internal-error";
  }
}

void wffd_default_rate_options(wffd_rate_options* opts) {
  if (opts == nullptr) return;
  const wffd::RateOptions d;
  opts->quad_abs_tol = d.quad.abs_tol;
  opts->nested_tol = d.nested_tol;
  opts->max_subdivisions = d.quad.max_subdivisions;
  opts->mc_budget = d.mc_budget;
  opts->fading_samples = d.fading_samples;
  opts->batches = d.batches;
  opts->seed = d.seed;
  opts->method = WFFD_METHOD_AUTO;
}

/* --- constellations ------------------------------------------------- */

int wffd_constellation_create(const double* points, const double* probs, size_t n,
                              wffd_constellation** out) {
  return guarded([&] {
    if (points == nullptr || probs == nullptr || out == nullptr)
      throw std::invalid_argument("constellation_create: null argument");
    wffd::Constellation c;
    c.points.assign(points, points + n);
    c.probs.assign(probs, probs + n);
    c.validate();
    *out = new wffd_constellation{std::move(c)};
  });
}

int wffd_constellation_pam(int m, wffd_constellation** out) {
  return guarded([&] {
    if (out == nullptr) throw std::invalid_argument("constellation_pam: null output");
    *out = new wffd_constellation{wffd::make_pam(m)};
  });
}

int wffd_constellation_standardize(const wffd_constellation* in, wffd_constellation** out) {
  return guarded([&] {
    if (in == nullptr || out == nullptr)
      throw std::invalid_argument("constellation_standardize: null argument");
    *out = new wffd_constellation{wffd::standardize(in->impl)};
  });
}

size_t wffd_constellation_size(const wffd_constellation* c) {
  return c == nullptr ? 0 : c->impl.points.size();
}

int wffd_constellation_get(const wffd_constellation* c, double* points, double* probs) {
  return guarded([&] {
    if (c == nullptr) throw std::invalid_argument("constellation_get: null handle");
    if (points != nullptr)
      std::memcpy(points, c->impl.points.data(), c->impl.points.size() * sizeof(double));
    if (probs != nullptr)
      std::memcpy(probs, c->impl.probs.data(), c->impl.probs.size() * sizeof(double));
  });
}

double wffd_constellation_mean(const wffd_constellation* c) {
  return c == nullptr ? 0.0 : c->impl.mean();
}

double wffd_constellation_variance(const wffd_constellation* c) {
  return c == nullptr ? 0.0 : c->impl.variance();
}

int wffd_constellation_from_json(const char* text, wffd_constellation** out) {
  return guarded([&] {
    if (text == nullptr || out == nullptr)
      throw std::invalid_argument("constellation_from_json: null argument");
    *out = new wffd_constellation{constellation_from_json_obj(json::parse(text))};
  });
}

int wffd_constellation_to_json(const wffd_constellation* c, char* buf, size_t cap,
                               size_t* len) {
  int rc = WFFD_OK;
  const int outer = guarded([&] {
    if (c == nullptr) throw std::invalid_argument("constellation_to_json: null handle");
    rc = emit_json(constellation_to_json_obj(c->impl), buf, cap, len);
  });
  return outer != WFFD_OK ? outer : rc;
}

void wffd_constellation_free(wffd_constellation* c) { delete c; }

/* --- fading models ---------------------------------------------------- */

int wffd_fading_discrete(const double* points, const double* probs, size_t n,
                         wffd_fading** out) {
  return guarded([&] {
    if (points == nullptr || probs == nullptr || out == nullptr)
      throw std::invalid_argument("fading_discrete: null argument");
    wffd::Constellation c;
    c.points.assign(points, points + n);
    c.probs.assign(probs, probs + n);
    *out = new wffd_fading{wffd::FadingModel::discrete(std::move(c))};
  });
}

int wffd_fading_uniform(double mean, double half_width, wffd_fading** out) {
  return guarded([&] {
    if (out == nullptr) throw std::invalid_argument("fading_uniform: null output");
    *out = new wffd_fading{wffd::FadingModel::uniform(mean, half_width)};
  });
}

int wffd_fading_gaussian(double mean, double variance, wffd_fading** out) {
  return guarded([&] {
    if (out == nullptr) throw std::invalid_argument("fading_gaussian: null output");
    *out = new wffd_fading{wffd::FadingModel::gaussian(mean, variance)};
  });
}

int wffd_fading_degenerate(double value, wffd_fading** out) {
  return guarded([&] {
    if (out == nullptr) throw std::invalid_argument("fading_degenerate: null output");
    *out = new wffd_fading{wffd::FadingModel::degenerate(value)};
  });
}

int wffd_fading_standardize(const wffd_fading* in, wffd_fading** out) {
  return guarded([&] {
    if (in == nullptr || out == nullptr)
      throw std::invalid_argument("fading_standardize: null argument");
    *out = new wffd_fading{wffd::standardize(in->impl)};
  });
}

double wffd_fading_mean(const wffd_fading* f) { return f == nullptr ? 0.0 : f->impl.mean(); }

double wffd_fading_variance(const wffd_fading* f) {
  return f == nullptr ? 0.0 : f->impl.variance();
}

int wffd_fading_from_json(const char* text, wffd_fading** out) {
  return guarded([&] {
    if (text == nullptr || out == nullptr)
      throw std::invalid_argument("fading_from_json: null argument");
    *out = new wffd_fading{fading_from_json_obj(json::parse(text))};
  });
}

int wffd_fading_to_json(const wffd_fading* f, char* buf, size_t cap, size_t* len) {
  int rc = WFFD_OK;
  const int outer = guarded([&] {
    if (f == nullptr) throw std::invalid_argument("fading_to_json: null handle");
    rc = emit_json(fading_to_json_obj(f->impl), buf, cap, len);
  });
  return outer != WFFD_OK ? outer : rc;
}

void wffd_fading_free(wffd_fading* f) { delete f; }

/* --- core numerics ------------------------------------------------------ */

int wffd_mixture_entropy(const double* means, const double* weights, size_t n, double sigma,
                         double abs_tol, double* out_bits) {
  return guarded([&] {
    if (means == nullptr || weights == nullptr || out_bits == nullptr)
      throw std::invalid_argument("mixture_entropy: null argument");
    wffd::GaussianMixture mix;
    mix.sigma = sigma;
    mix.components.reserve(n);
    for (size_t i = 0; i < n; ++i) mix.components.push_back({means[i], weights[i]});
    wffd::IntegrationConfig cfg;
    if (abs_tol > 0.0) cfg.abs_tol = abs_tol;
    *out_bits = wffd::mixture_entropy(mix, cfg);
  });
}

int wffd_discrete_entropy(const double* pmf, size_t n, double* out_bits) {
  return guarded([&] {
    if (pmf == nullptr || out_bits == nullptr)
      throw std::invalid_argument("discrete_entropy: null argument");
    *out_bits = wffd::discrete_entropy(std::span<const double>(pmf, n));
  });
}

double wffd_std_normal_cdf(double x) { return wffd::std_normal_cdf(x); }

/* --- channel sampling ------------------------------------------------------ */

int wffd_sample_block(wffd_channel_params params, const wffd_constellation* state,
                      const wffd_fading* fading, const double* x, size_t n, int noise_mode,
                      uint64_t seed, double* y, double* a, double* s) {
  return guarded([&] {
    if (state == nullptr || fading == nullptr || x == nullptr)
      throw std::invalid_argument("sample_block: null argument");
    const wffd::BlockSample block =
        wffd::sample_block(to_params(params), state->impl, fading->impl,
                           std::span<const double>(x, n), to_noise(noise_mode), seed);
    if (y != nullptr) std::memcpy(y, block.y.data(), n * sizeof(double));
    if (a != nullptr) std::memcpy(a, block.a.data(), n * sizeof(double));
    if (s != nullptr) std::memcpy(s, block.s.data(), n * sizeof(double));
  });
}

/* --- rate engine ------------------------------------------------------------ */

int wffd_awgn_capacity(double P, double* out_bits) {
  return guarded([&] {
    if (out_bits == nullptr) throw std::invalid_argument("awgn_capacity: null output");
    *out_bits = wffd::awgn_capacity(P);
  });
}

int wffd_gaussian_mismatch_loss(double P, double a, double k, double* out_bits) {
  return guarded([&] {
    if (out_bits == nullptr) throw std::invalid_argument("mismatch_loss: null output");
    *out_bits = wffd::gaussian_mismatch_loss(P, a, k);
  });
}

int wffd_costa_mismatch_rate(wffd_channel_params params, double k,
                             const wffd_constellation* state, const wffd_rate_options* opts,
                             wffd_rate_result* out) {
  return guarded([&] {
    if (out == nullptr) throw std::invalid_argument("costa_mismatch_rate: null output");
    std::optional<wffd::Constellation> s;
    if (state != nullptr) s = state->impl;
    fill_rate_result(wffd::costa_mismatch_rate(to_params(params), k, s, to_options(opts)),
                     out);
  });
}

int wffd_state_amplification_rate(wffd_channel_params params, const wffd_constellation* state,
                                  const wffd_fading* fading, int mode,
                                  const wffd_rate_options* opts, wffd_rate_result* out) {
  return guarded([&] {
    if (state == nullptr || fading == nullptr || out == nullptr)
      throw std::invalid_argument("state_amplification_rate: null argument");
    fill_rate_result(wffd::state_amplification_rate(to_params(params), state->impl,
                                                    fading->impl, to_mode(mode),
                                                    to_options(opts)),
                     out);
  });
}

int wffd_outer_bound(wffd_channel_params params, const wffd_constellation* state,
                     const wffd_fading* fading, int mode, const wffd_rate_options* opts,
                     wffd_rate_result* out, double* additive_constant,
                     wffd_condition_report* condition) {
  return guarded([&] {
    if (state == nullptr || fading == nullptr || out == nullptr)
      throw std::invalid_argument("outer_bound: null argument");
    const wffd::OuterBoundResult res = wffd::outer_bound(
        to_params(params), state->impl, fading->impl, to_mode(mode), to_options(opts));
    fill_rate_result(res.bound, out);
    if (additive_constant != nullptr) *additive_constant = res.additive_constant;
    if (condition != nullptr) fill_condition(res.condition, condition);
  });
}

int wffd_no_csit_gaussian_rate(wffd_channel_params params, const wffd_constellation* state,
                               const wffd_fading* fading, const wffd_rate_options* opts,
                               wffd_rate_result* out) {
  return guarded([&] {
    if (state == nullptr || fading == nullptr || out == nullptr)
      throw std::invalid_argument("no_csit_gaussian_rate: null argument");
    fill_rate_result(wffd::no_csit_gaussian_rate(to_params(params), state->impl,
                                                 fading->impl, to_options(opts)),
                     out);
  });
}

int wffd_linear_cancel_scan(wffd_channel_params params, const wffd_constellation* state,
                            const wffd_fading* fading, const double* alphas, size_t n_alphas,
                            const wffd_rate_options* opts, wffd_rate_result* per_alpha,
                            size_t* best_index) {
  return guarded([&] {
    if (state == nullptr || fading == nullptr || alphas == nullptr || per_alpha == nullptr)
      throw std::invalid_argument("linear_cancel_scan: null argument");
    const wffd::LinearCancelScan scan =
        wffd::linear_cancel_rate(to_params(params), state->impl, fading->impl,
                                 std::span<const double>(alphas, n_alphas), to_options(opts));
    for (size_t i = 0; i < scan.points.size(); ++i)
      fill_rate_result(scan.points[i].rate, &per_alpha[i]);
    if (best_index != nullptr) *best_index = scan.best_index;
  });
}

int wffd_identity_residual(wffd_channel_params params, const wffd_constellation* state,
                           const wffd_fading* fading, const wffd_rate_options* opts,
                           double* lhs, double* rhs) {
  return guarded([&] {
    if (state == nullptr || fading == nullptr || lhs == nullptr || rhs == nullptr)
      throw std::invalid_argument("identity_residual: null argument");
    const wffd::IdentityResidual res =
        wffd::identity_residual(to_params(params), state->impl, fading->impl, to_options(opts));
    *lhs = res.lhs;
    *rhs = res.rhs;
  });
}

/* --- separation geometry ---------------------------------------------------- */

int wffd_ncsi_min_gap(wffd_channel_params params, const wffd_constellation* state,
                      const wffd_fading* fading, wffd_condition_report* out) {
  return guarded([&] {
    if (state == nullptr || fading == nullptr || out == nullptr)
      throw std::invalid_argument("ncsi_min_gap: null argument");
    fill_condition(wffd::ncsi_min_gap(to_params(params), state->impl, fading->impl), out);
  });
}

int wffd_rcsi_min_gap(wffd_channel_params params, const wffd_constellation* state,
                      const wffd_fading* fading, wffd_condition_report* out) {
  return guarded([&] {
    if (state == nullptr || fading == nullptr || out == nullptr)
      throw std::invalid_argument("rcsi_min_gap: null argument");
    fill_condition(wffd::rcsi_min_gap(to_params(params), state->impl, fading->impl), out);
  });
}

int wffd_pam_uniform_regions(wffd_channel_params params, double c, int m, double mu_A,
                             wffd_region* regions, size_t cap, size_t* count) {
  return guarded([&] {
    const auto res = wffd::pam_uniform_regions(to_params(params), c, m, mu_A);
    if (count != nullptr) *count = res.size();
    if (regions == nullptr) return;
    if (cap < res.size()) throw std::invalid_argument("pam_uniform_regions: buffer too small");
    for (size_t i = 0; i < res.size(); ++i) {
      regions[i].input = res[i].input;
      regions[i].state_index = res[i].state_index;
      regions[i].state_point = res[i].state_point;
      regions[i].lo = res[i].interval.lo;
      regions[i].hi = res[i].interval.hi;
    }
  });
}

int wffd_min_region_gap(const double* lo, const double* hi, size_t n, double* out_gap) {
  return guarded([&] {
    if (lo == nullptr || hi == nullptr || out_gap == nullptr)
      throw std::invalid_argument("min_region_gap: null argument");
    std::vector<wffd::Interval> intervals(n);
    for (size_t i = 0; i < n; ++i) {
      if (!(lo[i] <= hi[i]))
        throw std::invalid_argument("min_region_gap: interval lo must be <= hi");
      intervals[i] = wffd::Interval{lo[i], hi[i]};
    }
    *out_gap = wffd::min_region_gap(intervals);
  });
}

/* --- gap constants ------------------------------------------------------------ */

double wffd_rho_z(long long i) { return i < 0 ? -1.0 : wffd::rho_z(i); }

double wffd_quantized_noise_entropy(void) { return wffd::quantized_noise_entropy(); }

void wffd_quantized_noise_entropy_terms(wffd_quantizer_entropy_terms* out) {
  if (out == nullptr) return;
  const wffd::QuantizerEntropyTerms t = wffd::quantized_noise_entropy_terms();
  out->center = t.center;
  out->near_terms = t.near;
  out->tail = t.tail;
  out->total = t.total;
  out->claimed_center = t.claimed_center;
  out->claimed_near = t.claimed_near;
  out->claimed_tail = t.claimed_tail;
  out->claimed_total = t.claimed_total;
  out->tail_over_covered = t.tail_over_covered ? 1 : 0;
}

double wffd_integer_restriction_gap(void) { return wffd::integer_restriction_gap(); }

int wffd_gap_breakdown_get(int mode, wffd_gap_breakdown* out) {
  return guarded([&] {
    if (out == nullptr) throw std::invalid_argument("gap_breakdown: null output");
    const wffd::GapBreakdown b = wffd::gap_breakdown(to_mode(mode));
    out->integer_restriction = b.integer_restriction;
    out->peak_restriction = b.peak_restriction;
    out->quantized_noise_entropy = b.quantized_noise_entropy;
    out->additive_constant = b.additive_constant;
    out->total_claimed = b.total_claimed;
    out->mode = mode;
    copy_str(out->note, sizeof(out->note), b.note);
  });
}

/* --- decoding simulation -------------------------------------------------------- */

int wffd_run_decoding_sim(const wffd_sim_config* cfg, wffd_channel_params params,
                          const wffd_constellation* x_const, const wffd_constellation* state,
                          const wffd_fading* fading, wffd_sim_result* out) {
  return guarded([&] {
    if (cfg == nullptr || x_const == nullptr || state == nullptr || fading == nullptr ||
        out == nullptr)
      throw std::invalid_argument("run_decoding_sim: null argument");
    wffd::SimConfig c;
    c.n_symbols = cfg->n_symbols;
    c.seed = cfg->seed;
    c.noise_mode = to_noise(cfg->noise_mode);
    c.mode = to_mode(cfg->mode);
    c.jobs = cfg->jobs;
    const wffd::SimResult res =
        wffd::run_decoding_sim(c, to_params(params), x_const->impl, state->impl, fading->impl);
    out->joint_error_rate = res.joint_error_rate;
    out->state_error_rate = res.state_error_rate;
    out->input_error_rate = res.input_error_rate;
    out->n = res.n;
    out->seed = res.seed;
    out->joint_errors = res.joint_errors;
    out->state_errors = res.state_errors;
    out->input_errors = res.input_errors;
  });
}

double wffd_wilson_halfwidth(long long errors, long long n) {
  return wffd::wilson_halfwidth(errors, n);
}

}  // extern "C"
