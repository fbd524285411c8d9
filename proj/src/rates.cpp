#include "wffd/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "densities.hpp"
#include "rng.hpp"

namespace wffd {

namespace {

constexpr double kLogTwoPi = detail::kLogTwoPiConst;

double log2_normal_pdf(double x, double mean, double var) {
  return detail::log2_normal_pdf_at(x, mean, var);
}

double log2_sum_exp2(std::span<const double> terms) {
  return detail::log2_sum_exp2_span(terms);
}

double entropy_of(std::vector<double> means, std::vector<double> weights, double sigma,
                  const IntegrationConfig& cfg) {
  GaussianMixture mix;
  mix.sigma = sigma;
  mix.components.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i)
    mix.components.push_back({means[i], weights[i]});
  return mixture_entropy(mix, cfg);
}

struct BatchStats {
  double mean = 0.0;
  double stderr_ = 0.0;
};

BatchStats batch_mean_stderr(std::span<const double> values, int batches) {
  BatchStats out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  const int b = std::max(2, std::min<int>(batches, static_cast<int>(n)));
  std::vector<double> bm(static_cast<std::size_t>(b), 0.0);
  std::vector<long long> cnt(static_cast<std::size_t>(b), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i * static_cast<std::size_t>(b) / n;
    bm[k] += values[i];
    cnt[k] += 1;
  }
  double var = 0.0;
  for (int k = 0; k < b; ++k) {
    bm[static_cast<std::size_t>(k)] /= static_cast<double>(cnt[static_cast<std::size_t>(k)]);
    const double d = bm[static_cast<std::size_t>(k)] - out.mean;
    var += d * d;
  }
  var /= static_cast<double>(b - 1);
  out.stderr_ = std::sqrt(var / static_cast<double>(b));
  return out;
}

double smear_density(const FadingModel& fading, double c, double s, double base_var,
                     double t) {
  return detail::fading_smear_density(fading, c, s, base_var, t);
}

std::vector<double> sample_fading_atoms(const FadingModel& fading, long long n,
                                        std::uint64_t seed) {
  detail::Rng rng(detail::mix_seed(seed, 0xFADE));
  detail::FadingSampler draw(fading);
  std::vector<double> atoms(static_cast<std::size_t>(n));
  for (auto& a : atoms) a = draw(rng);
  return atoms;
}

void set_method(RateResult& r, const char* fmt, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, x);
  r.method = buf;
}

RateResult finish(RateResult r) {
  r.negative = r.rate < 0.0;
  if (r.negative && r.note.empty()) r.note = "inner bound fell below zero; reported unclamped";
  return r;
}

}  // namespace

double awgn_capacity(double P) {
  if (!(P >= 0.0)) throw std::invalid_argument("awgn_capacity: P must be >= 0");
  return 0.5 * std::log2(1.0 + P);
}

double gaussian_mismatch_loss(double P, double a, double k) {
  if (!(P > 0.0)) throw std::invalid_argument("gaussian_mismatch_loss: P must be > 0");
  if (!std::isfinite(a) || !std::isfinite(k))
    throw std::invalid_argument("gaussian_mismatch_loss: non-finite input");
  const double km1 = k - 1.0;
  return 0.5 * std::log2(1.0 + P * a * a * km1 * km1 / (P + a * a + 1.0));
}

// ---------------------------------------------------------------------------
// Costa precoding with a mismatched state-gain estimate.
// ---------------------------------------------------------------------------

namespace {

RateResult costa_gaussian_closed_form(const ChannelParams& params, double k) {
  const double P = params.P;
  const double c = params.c;
  const double b = (P / (P + 1.0)) * k * c;
  const double var_u = P + b * b;
  const double var_y = P + c * c + 1.0;
  const double cov = P + b * c;
  // R = h(U|S) - h(U|Y) = 0.5*log2(P / Var[U|Y])
  const double cond_var = var_u - cov * cov / var_y;
  RateResult r;
  r.rate = 0.5 * std::log2(P / cond_var);
  r.method = "closed-form";
  r.numeric_error = 1e-15;
  return finish(r);
}

RateResult costa_discrete_quadrature(const ChannelParams& params, double k,
                                     const Constellation& state, const RateOptions& opts) {
  const double P = params.P;
  const double c = params.c;
  const double b = (P / (P + 1.0)) * k * c;
  const auto& s_pts = state.points;
  const auto& s_probs = state.probs;
  const std::size_t m = s_pts.size();

  std::vector<double> means_y(m), means_u(m);
  for (std::size_t j = 0; j < m; ++j) {
    means_y[j] = c * s_pts[j];
    means_u[j] = b * s_pts[j];
  }
  const double h_y = entropy_of(means_y, s_probs, std::sqrt(P + 1.0), opts.quad);
  const double h_u = entropy_of(means_u, s_probs, std::sqrt(P), opts.quad);
  const double h_u_given_s = kHalfLog2TwoPiE + 0.5 * std::log2(P);

  // h(Y|U): outer integral over u of the entropy of the posterior-weighted
  // mixture with means (c-b)s and unit sigma (translation by u drops out).
  const double sd_u = std::sqrt(P);
  double u_lo = means_u[0], u_hi = means_u[0];
  for (double mu : means_u) {
    u_lo = std::min(u_lo, mu);
    u_hi = std::max(u_hi, mu);
  }
  u_lo -= opts.quad.support_clip * sd_u;
  u_hi += opts.quad.support_clip * sd_u;

  std::vector<double> inner_means(m);
  for (std::size_t j = 0; j < m; ++j) inner_means[j] = (c - b) * s_pts[j];

  long long budget = opts.quad.max_subdivisions;
  std::vector<double> log_w(m);
  IntegrationConfig inner_cfg = opts.quad;
  // Posterior switch points sit between adjacent auxiliary means; panel the
  // outer integral there so the coarse pass cannot skip them.
  std::vector<double> u_features = means_u;
  {
    std::vector<double> sorted = means_u;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j + 1 < sorted.size(); ++j)
      u_features.push_back(0.5 * (sorted[j] + sorted[j + 1]));
  }
  const std::vector<double> u_cuts = quadrature_cuts(u_features, sd_u, u_lo, u_hi);
  auto h_y_given_u_at = [&](double u) {
    // posterior over s given U = u
    for (std::size_t j = 0; j < m; ++j) {
      const double d = u - means_u[j];
      log_w[j] = std::log2(s_probs[j]) - 0.5 * kLog2E * d * d / P;
    }
    const double lse = log2_sum_exp2(log_w);
    const double p_u = std::exp2(lse) / std::sqrt(2.0 * M_PI * P);
    if (p_u <= 0.0) return 0.0;
    std::vector<double> w(m);
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      w[j] = std::exp2(log_w[j] - lse);
      total += w[j];
    }
    for (std::size_t j = 0; j < m; ++j) w[j] /= total;
    const double h_inner = entropy_of(inner_means, w, 1.0, inner_cfg);
    return p_u * h_inner;
  };
  const double h_y_given_u =
      integrate_piecewise(h_y_given_u_at, u_cuts, opts.nested_tol, &budget);

  RateResult r;
  r.rate = h_y - h_y_given_u - h_u + h_u_given_s;
  r.method = "quadrature";
  r.numeric_error = 2.0 * opts.quad.abs_tol + opts.nested_tol + opts.quad.abs_tol;
  return finish(r);
}

RateResult costa_monte_carlo(const ChannelParams& params, double k,
                             const std::optional<Constellation>& state,
                             const RateOptions& opts) {
  const double P = params.P;
  const double c = params.c;
  const double b = (P / (P + 1.0)) * k * c;
  const long long n = opts.mc_budget;
  detail::Rng rng(detail::mix_seed(opts.seed, 0xC057A));

  // Joint (U, Y) given S = s is bivariate normal, cov [[P, P], [P, P+1]].
  const double det = P;  // P*(P+1) - P^2
  const double log2_norm2 = -kLog2E * (kLogTwoPi + 0.5 * std::log(det));
  auto log2_pdf2 = [&](double du, double dy) {
    const double quad = ((P + 1.0) * du * du - 2.0 * P * du * dy + P * dy * dy) / det;
    return log2_norm2 - 0.5 * kLog2E * quad;
  };

  std::optional<detail::DiscreteSampler> draw_state;
  if (state) draw_state.emplace(*state);

  std::vector<double> est(static_cast<std::size_t>(n));
  std::vector<double> terms_joint;
  std::vector<double> terms_y;
  for (long long t = 0; t < n; ++t) {
    const double x = std::sqrt(P) * rng.normal();
    const double s = draw_state ? (*draw_state)(rng) : rng.normal();
    const double z = rng.normal();
    const double u = x + b * s;
    const double y = x + c * s + z;

    double log2_p_uy, log2_p_y;
    if (state) {
      const auto& pts = state->points;
      const auto& pr = state->probs;
      terms_joint.resize(pts.size());
      terms_y.resize(pts.size());
      for (std::size_t j = 0; j < pts.size(); ++j) {
        const double lw = std::log2(pr[j]);
        terms_joint[j] = lw + log2_pdf2(u - b * pts[j], y - c * pts[j]);
        terms_y[j] = lw + log2_normal_pdf(y, c * pts[j], P + 1.0);
      }
      log2_p_uy = log2_sum_exp2(terms_joint);
      log2_p_y = log2_sum_exp2(terms_y);
    } else {
      const double var_u = P + b * b;
      const double var_y = P + c * c + 1.0;
      const double cov = P + b * c;
      const double d2 = var_u * var_y - cov * cov;
      const double quad = (var_y * u * u - 2.0 * cov * u * y + var_u * y * y) / d2;
      log2_p_uy = -kLog2E * (kLogTwoPi + 0.5 * std::log(d2)) - 0.5 * kLog2E * quad;
      log2_p_y = log2_normal_pdf(y, 0.0, var_y);
    }
    const double log2_p_u_given_s = log2_normal_pdf(u, b * s, P);
    est[static_cast<std::size_t>(t)] = (log2_p_uy - log2_p_y) - log2_p_u_given_s;
  }
  const BatchStats st = batch_mean_stderr(est, opts.batches);
  RateResult r;
  r.rate = st.mean;
  r.method = "monte-carlo";
  r.numeric_error = st.stderr_;
  r.samples_used = n;
  return finish(r);
}

}  // namespace

RateResult costa_mismatch_rate(const ChannelParams& params, double k,
                               const std::optional<Constellation>& state,
                               const RateOptions& opts) {
  params.validate();
  if (!std::isfinite(k)) throw std::invalid_argument("costa_mismatch_rate: non-finite k");
  if (state) state->validate();
  if (opts.mc_budget < 10000)
    throw std::invalid_argument("costa_mismatch_rate: mc_budget must be >= 10^4");

  switch (opts.method) {
    case RateMethod::kMonteCarlo:
      return costa_monte_carlo(params, k, state, opts);
    case RateMethod::kQuadrature:
      if (state) return costa_discrete_quadrature(params, k, *state, opts);
      return costa_gaussian_closed_form(params, k);
    case RateMethod::kClosedForm:
      if (!state) return costa_gaussian_closed_form(params, k);
      throw std::invalid_argument("costa_mismatch_rate: no closed form for discrete states");
    case RateMethod::kAuto:
    default:
      if (state) return costa_discrete_quadrature(params, k, *state, opts);
      return costa_gaussian_closed_form(params, k);
  }
}

// ---------------------------------------------------------------------------
// State amplification
// ---------------------------------------------------------------------------

namespace {

// Exact enumeration for a discrete fading law (atoms + probs given here so
// sampled empirical laws reuse the same code).
double sa_rate_discrete(const ChannelParams& params, const Constellation& state,
                        std::span<const double> a_pts, std::span<const double> a_probs,
                        CsiMode mode, const RateOptions& opts, double quad_tol) {
  const double P = params.P;
  const double c = params.c;
  IntegrationConfig cfg = opts.quad;
  cfg.abs_tol = quad_tol;
  const double h_s = discrete_entropy(state.probs);

  if (mode == CsiMode::kNcsi) {
    std::vector<double> means, weights;
    means.reserve(a_pts.size() * state.points.size());
    weights.reserve(means.capacity());
    for (std::size_t ai = 0; ai < a_pts.size(); ++ai)
      for (std::size_t sj = 0; sj < state.points.size(); ++sj) {
        means.push_back(c * a_pts[ai] * state.points[sj]);
        weights.push_back(a_probs[ai] * state.probs[sj]);
      }
    const double h_y = entropy_of(means, weights, std::sqrt(P + 1.0), cfg);

    double h_y_given_xs = 0.0;
    for (std::size_t sj = 0; sj < state.points.size(); ++sj) {
      std::vector<double> ms(a_pts.size());
      for (std::size_t ai = 0; ai < a_pts.size(); ++ai)
        ms[ai] = c * a_pts[ai] * state.points[sj];
      std::vector<double> ws(a_probs.begin(), a_probs.end());
      h_y_given_xs += state.probs[sj] * entropy_of(std::move(ms), std::move(ws), 1.0, cfg);
    }
    return h_y - h_y_given_xs - h_s;
  }

  // RCSI: E_A[h(Y|A)] - 0.5*log2(2*pi*e) - H(S)
  double e_h_y_given_a = 0.0;
  for (std::size_t ai = 0; ai < a_pts.size(); ++ai) {
    std::vector<double> ms(state.points.size());
    for (std::size_t sj = 0; sj < state.points.size(); ++sj)
      ms[sj] = c * a_pts[ai] * state.points[sj];
    e_h_y_given_a +=
        a_probs[ai] * entropy_of(std::move(ms), state.probs, std::sqrt(P + 1.0), cfg);
  }
  return e_h_y_given_a - kHalfLog2TwoPiE - h_s;
}

RateResult sa_monte_carlo(const ChannelParams& params, const Constellation& state,
                          const FadingModel& fading, CsiMode mode, const RateOptions& opts) {
  const double P = params.P;
  const double c = params.c;
  const long long n = opts.mc_budget;
  detail::Rng rng(detail::mix_seed(opts.seed, 0x5A));
  detail::DiscreteSampler draw_state(state);
  detail::FadingSampler draw_fading(fading);
  const double h_s = discrete_entropy(state.probs);

  std::vector<double> est(static_cast<std::size_t>(n));
  std::vector<double> terms;
  for (long long t = 0; t < n; ++t) {
    const double x = std::sqrt(P) * rng.normal();
    const double s = draw_state(rng);
    const double a = draw_fading(rng);
    const double z = rng.normal();
    const double y = x + c * a * s + z;

    double log2_cond, log2_marg;
    if (mode == CsiMode::kNcsi) {
      // log2 p(y | x, s) marginalized over A, and log2 p(y).
      log2_cond = std::log2(smear_density(fading, c, s, 1.0, y - x));
      terms.resize(state.points.size());
      for (std::size_t j = 0; j < state.points.size(); ++j)
        terms[j] = std::log2(state.probs[j]) +
                   std::log2(smear_density(fading, c, state.points[j], P + 1.0, y));
      log2_marg = log2_sum_exp2(terms);
    } else {
      log2_cond = log2_normal_pdf(y, x + c * a * s, 1.0);
      terms.resize(state.points.size());
      for (std::size_t j = 0; j < state.points.size(); ++j)
        terms[j] = std::log2(state.probs[j]) +
                   log2_normal_pdf(y, c * a * state.points[j], P + 1.0);
      log2_marg = log2_sum_exp2(terms);
    }
    est[static_cast<std::size_t>(t)] = log2_cond - log2_marg;
  }
  const BatchStats st = batch_mean_stderr(est, opts.batches);
  RateResult r;
  r.rate = st.mean - h_s;
  r.method = "monte-carlo";
  r.numeric_error = st.stderr_;
  r.samples_used = n;
  return finish(r);
}

}  // namespace

RateResult state_amplification_rate(const ChannelParams& params, const Constellation& state,
                                    const FadingModel& fading, CsiMode mode,
                                    const RateOptions& opts) {
  params.validate();
  state.validate();
  fading.validate();

  if (opts.method == RateMethod::kMonteCarlo)
    return sa_monte_carlo(params, state, fading, mode, opts);

  if (fading.is_discrete()) {
    const auto& law = fading.discrete_law();
    RateResult r;
    r.rate = sa_rate_discrete(params, state, law.points, law.probs, mode, opts,
                              opts.quad.abs_tol);
    r.method = "quadrature";
    r.numeric_error = 4.0 * opts.quad.abs_tol;
    return finish(r);
  }

  // Continuous fading: sample A, evaluate the empirical law exactly, report
  // batch-mean spread as the Monte Carlo error component.
  const long long n = opts.fading_samples;
  const std::vector<double> atoms = sample_fading_atoms(fading, n, opts.seed);
  const std::vector<double> probs(atoms.size(), 1.0 / static_cast<double>(atoms.size()));

  RateResult r;
  if (mode == CsiMode::kRcsi) {
    // Per-sample h(Y|A=a): mean and batch spread come from the same draws.
    std::vector<double> per_sample(atoms.size());
    IntegrationConfig cfg = opts.quad;
    cfg.abs_tol = std::max(opts.quad.abs_tol, opts.nested_tol);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      std::vector<double> ms(state.points.size());
      for (std::size_t j = 0; j < state.points.size(); ++j)
        ms[j] = params.c * atoms[i] * state.points[j];
      per_sample[i] =
          entropy_of(std::move(ms), state.probs, std::sqrt(params.P + 1.0), cfg);
    }
    const BatchStats st = batch_mean_stderr(per_sample, opts.batches);
    r.rate = st.mean - kHalfLog2TwoPiE - discrete_entropy(state.probs);
    r.numeric_error = st.stderr_ + cfg.abs_tol;
  } else {
    const double full = sa_rate_discrete(params, state, atoms, probs, mode, opts,
                                         std::max(opts.quad.abs_tol, opts.nested_tol));
    // Batch spread: recompute on disjoint slices of the fading draws.
    const int b = std::max(2, std::min<int>(8, static_cast<int>(atoms.size() / 64)));
    std::vector<double> batch_rates;
    for (int k = 0; k < b; ++k) {
      const std::size_t lo = atoms.size() * static_cast<std::size_t>(k) / static_cast<std::size_t>(b);
      const std::size_t hi = atoms.size() * static_cast<std::size_t>(k + 1) / static_cast<std::size_t>(b);
      if (hi <= lo) continue;
      std::vector<double> sub(atoms.begin() + static_cast<long>(lo),
                              atoms.begin() + static_cast<long>(hi));
      std::vector<double> subp(sub.size(), 1.0 / static_cast<double>(sub.size()));
      batch_rates.push_back(sa_rate_discrete(params, state, sub, subp, mode, opts,
                                             std::max(opts.quad.abs_tol, 1e-6)));
    }
    double mean = 0.0;
    for (double v : batch_rates) mean += v;
    mean /= static_cast<double>(batch_rates.size());
    double var = 0.0;
    for (double v : batch_rates) var += (v - mean) * (v - mean);
    var /= static_cast<double>(batch_rates.size() - 1);
    r.rate = full;
    r.numeric_error = std::sqrt(var / static_cast<double>(batch_rates.size())) +
                      std::max(opts.quad.abs_tol, opts.nested_tol);
  }
  r.method = "sampled-fading quadrature";
  r.samples_used = n;
  return finish(r);
}

OuterBoundResult outer_bound(const ChannelParams& params, const Constellation& state,
                             const FadingModel& fading, CsiMode mode,
                             const RateOptions& opts) {
  OuterBoundResult out;
  out.additive_constant = mode == CsiMode::kNcsi ? 4.0 : 6.0;
  out.condition = mode == CsiMode::kNcsi ? ncsi_min_gap(params, state, fading)
                                         : rcsi_min_gap(params, state, fading);
  RateResult sa = state_amplification_rate(params, state, fading, mode, opts);
  out.bound = sa;
  out.bound.rate = sa.rate + out.additive_constant;
  out.bound.negative = out.bound.rate < 0.0;
  out.bound.note = "bound template at X ~ N(0,P) independent of S";
  if (!out.condition.satisfied)
    out.bound.note += "; separation condition not satisfied for this configuration";
  return out;
}

// ---------------------------------------------------------------------------
// Rates without transmitter state knowledge (receiver knows A), and the
// linear cancellation strategy.
// ---------------------------------------------------------------------------

namespace {

// I(Y; X~ | A = a) for signal variance sig_var and dirt means mu_j: the
// mixture entropy difference between sigma = sqrt(sig_var + 1) and sigma = 1.
double cond_mi_at(const std::vector<double>& dirt_means, const std::vector<double>& probs,
                  double sig_var, const IntegrationConfig& cfg) {
  std::vector<double> m1 = dirt_means;
  std::vector<double> m2 = dirt_means;
  const double h_y = entropy_of(std::move(m1), probs, std::sqrt(sig_var + 1.0), cfg);
  const double h_y_given_x = entropy_of(std::move(m2), probs, 1.0, cfg);
  return h_y - h_y_given_x;
}

struct CondMiSpec {
  double signal_var = 0.0;
  // dirt coefficient per state: mean_j(a) = coef_a * a * s_j + offset(s_j)
  std::function<double(double, double)> mean_of;  // (a, s) -> mean
};

RateResult average_cond_mi(const Constellation& state,
                           const FadingModel& fading, const CondMiSpec& spec,
                           const RateOptions& opts, const char* method_label) {
  IntegrationConfig cfg = opts.quad;
  RateResult r;
  if (fading.is_discrete()) {
    const auto& law = fading.discrete_law();
    double acc = 0.0;
    for (std::size_t ai = 0; ai < law.points.size(); ++ai) {
      std::vector<double> means(state.points.size());
      for (std::size_t j = 0; j < state.points.size(); ++j)
        means[j] = spec.mean_of(law.points[ai], state.points[j]);
      acc += law.probs[ai] * cond_mi_at(means, state.probs, spec.signal_var, cfg);
    }
    r.rate = acc;
    r.method = method_label;
    r.numeric_error = 2.0 * cfg.abs_tol;
    return finish(r);
  }
  cfg.abs_tol = std::max(opts.quad.abs_tol, opts.nested_tol);
  const std::vector<double> atoms =
      sample_fading_atoms(fading, opts.fading_samples, opts.seed);
  std::vector<double> per_sample(atoms.size());
  std::vector<double> means(state.points.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = 0; j < state.points.size(); ++j)
      means[j] = spec.mean_of(atoms[i], state.points[j]);
    per_sample[i] = cond_mi_at(means, state.probs, spec.signal_var, cfg);
  }
  const BatchStats st = batch_mean_stderr(per_sample, opts.batches);
  r.rate = st.mean;
  r.method = std::string(method_label) + " (sampled fading)";
  r.numeric_error = st.stderr_ + 2.0 * cfg.abs_tol;
  r.samples_used = static_cast<long long>(atoms.size());
  return finish(r);
}

}  // namespace

RateResult no_csit_gaussian_rate(const ChannelParams& params, const Constellation& state,
                                 const FadingModel& fading, const RateOptions& opts) {
  params.validate();
  state.validate();
  fading.validate();
  CondMiSpec spec;
  spec.signal_var = params.P;
  const double c = params.c;
  spec.mean_of = [c](double a, double s) { return c * a * s; };
  return average_cond_mi(state, fading, spec, opts, "gaussian-input");
}

void validate_strategy(const InputStrategy& strategy, const Constellation& state) {
  state.validate();
  if (const auto* lc = std::get_if<LinearCancel>(&strategy)) {
    if (!(lc->alpha >= 0.0 && lc->alpha <= 1.0))
      throw std::invalid_argument("linear-cancel: alpha must be in [0, 1]");
    auto k_map = lc->k_map ? lc->k_map : [](double s) { return -s; };
    double mean = 0.0, second = 0.0;
    for (std::size_t j = 0; j < state.points.size(); ++j) {
      const double k = k_map(state.points[j]);
      mean += state.probs[j] * k;
      second += state.probs[j] * k * k;
    }
    if (std::abs(mean) > 1e-9 || std::abs(second - mean * mean - 1.0) > 1e-9)
      throw std::invalid_argument(
          "linear-cancel: k_map must have zero mean and unit variance under the state law");
  } else if (const auto* di = std::get_if<DiscreteInput>(&strategy)) {
    di->constellation.validate();
  } else if (const auto* cp = std::get_if<CostaPrecoding>(&strategy)) {
    if (!std::isfinite(cp->k)) throw std::invalid_argument("costa: non-finite k");
  }
}

LinearCancelScan linear_cancel_rate(const ChannelParams& params, const Constellation& state,
                                    const FadingModel& fading, std::span<const double> alphas,
                                    const RateOptions& opts,
                                    const std::function<double(double)>& k_map) {
  params.validate();
  state.validate();
  fading.validate();
  if (alphas.empty()) throw std::invalid_argument("linear_cancel_rate: empty alpha grid");
  auto km = k_map ? k_map : [](double s) { return -s; };
  validate_strategy(LinearCancel{1.0, km}, state);

  const double P = params.P;
  const double c = params.c;
  LinearCancelScan scan;
  scan.points.reserve(alphas.size());
  for (double alpha : alphas) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw std::invalid_argument("linear_cancel_rate: alpha must be in [0, 1]");
    CondMiSpec spec;
    spec.signal_var = P * alpha * alpha;
    const double cancel_gain = std::sqrt(P) * std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
    spec.mean_of = [c, cancel_gain, &km](double a, double s) {
      return c * a * s + cancel_gain * km(s);
    };
    RateResult r = average_cond_mi(state, fading, spec, opts, "linear-cancel");
    scan.points.push_back(LinearCancelPoint{alpha, std::move(r)});
  }
  scan.best_index = 0;
  for (std::size_t i = 1; i < scan.points.size(); ++i)
    if (scan.points[i].rate.rate > scan.points[scan.best_index].rate.rate)
      scan.best_index = i;
  scan.best = scan.points[scan.best_index].rate;
  set_method(scan.best, "linear-cancel(alpha=%.4f)", scan.points[scan.best_index].alpha);
  return scan;
}

std::vector<double> default_alpha_grid() {
  return {0.60, 0.70, 0.80, 0.85, 0.90, 0.95, 0.98, 1.0};
}

RateResult no_csit_rate(const ChannelParams& params, const Constellation& state,
                        const FadingModel& fading, const InputStrategy& strategy,
                        const RateOptions& opts) {
  validate_strategy(strategy, state);
  if (std::holds_alternative<GaussianInput>(strategy))
    return no_csit_gaussian_rate(params, state, fading, opts);
  if (const auto* lc = std::get_if<LinearCancel>(&strategy)) {
    const std::vector<double> grid = default_alpha_grid();
    return linear_cancel_rate(params, state, fading, grid, opts, lc->k_map).best;
  }
  throw std::invalid_argument("no_csit_rate: strategy must be GaussianInput or LinearCancel");
}

// ---------------------------------------------------------------------------
// Chain-rule identity check
// ---------------------------------------------------------------------------

IdentityResidual identity_residual(const ChannelParams& params, const Constellation& state,
                                   const FadingModel& fading, const RateOptions& opts) {
  params.validate();
  state.validate();
  fading.validate();
  if (!fading.is_discrete())
    throw UnsupportedModelError("identity_residual: requires a discrete fading law");
  const auto& a_law = fading.discrete_law();
  const double c = params.c;

  IdentityResidual out;
  out.lhs = state_amplification_rate(params, state, fading, CsiMode::kRcsi, opts).rate;

  // RHS: I(Y;X|A) - H(S|X,A,Y). Given A = a, the posterior of S depends on
  // (x, y) only through t = y - x, whose law is the unit-sigma mixture at
  // means c*a*s.
  IntegrationConfig cfg = opts.quad;
  double mi = 0.0;
  double h_s_given_xay = 0.0;
  const std::size_t m = state.points.size();
  for (std::size_t ai = 0; ai < a_law.points.size(); ++ai) {
    const double a = a_law.points[ai];
    std::vector<double> means(m);
    for (std::size_t j = 0; j < m; ++j) means[j] = c * a * state.points[j];
    mi += a_law.probs[ai] * cond_mi_at(means, state.probs, params.P, cfg);

    double lo = means[0], hi = means[0];
    for (double mu : means) {
      lo = std::min(lo, mu);
      hi = std::max(hi, mu);
    }
    lo -= cfg.support_clip;
    hi += cfg.support_clip;
    long long budget = cfg.max_subdivisions;
    std::vector<double> t_features = means;
    {
      std::vector<double> sorted = means;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t j = 0; j + 1 < sorted.size(); ++j)
        t_features.push_back(0.5 * (sorted[j] + sorted[j + 1]));
    }
    const std::vector<double> t_cuts = quadrature_cuts(t_features, 1.0, lo, hi);
    std::vector<double> logw(m);
    auto weighted_posterior_entropy = [&](double t) {
      for (std::size_t j = 0; j < m; ++j) {
        const double d = t - means[j];
        logw[j] = std::log2(state.probs[j]) - 0.5 * kLog2E * d * d;
      }
      const double lse = log2_sum_exp2(logw);
      const double pt = std::exp2(lse) / std::sqrt(2.0 * M_PI);
      if (pt <= 0.0) return 0.0;
      double h = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double w = std::exp2(logw[j] - lse);
        if (w > 0.0) h -= w * std::log2(w);
      }
      return pt * h;
    };
    h_s_given_xay += a_law.probs[ai] * integrate_piecewise(weighted_posterior_entropy, t_cuts,
                                                           opts.nested_tol, &budget);
  }
  out.rhs = mi - h_s_given_xay;
  return out;
}

}  // namespace wffd
