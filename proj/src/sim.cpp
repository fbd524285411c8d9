#include "wffd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "densities.hpp"
#include "rng.hpp"

namespace wffd {

namespace {

constexpr double kResidualBound = 0.25 + 1e-12;

struct Hypothesis {
  double x;
  double s;
  std::size_t x_idx;
  std::size_t s_idx;
};

struct ErrorCounts {
  long long joint = 0;
  long long state = 0;
  long long input = 0;

  ErrorCounts& operator+=(const ErrorCounts& o) {
    joint += o.joint;
    state += o.state;
    input += o.input;
    return *this;
  }
};

// Feasibility of |y - x - c*a*s| <= 1/4 for some a in the fading support.
bool residual_feasible(const FadingModel& fading, double c, double s, double t) {
  if (fading.is_discrete()) {
    for (double a : fading.discrete_law().points)
      if (std::abs(t - c * a * s) <= kResidualBound) return true;
    return false;
  }
  if (const auto* u = std::get_if<UniformInterval>(&fading.law)) {
    const double e1 = c * s * (u->mean - u->half_width);
    const double e2 = c * s * (u->mean + u->half_width);
    return t >= std::min(e1, e2) - kResidualBound && t <= std::max(e1, e2) + kResidualBound;
  }
  // Gaussian fading: unbounded support, every s != 0 is feasible.
  if (c * s != 0.0) return true;
  return std::abs(t) <= kResidualBound;
}

double residual_distance(const FadingModel& fading, double c, double s, double t) {
  if (fading.is_discrete()) {
    double best = std::numeric_limits<double>::infinity();
    for (double a : fading.discrete_law().points)
      best = std::min(best, std::abs(t - c * a * s));
    return best;
  }
  if (const auto* u = std::get_if<UniformInterval>(&fading.law)) {
    const double e1 = c * s * (u->mean - u->half_width);
    const double e2 = c * s * (u->mean + u->half_width);
    const double lo = std::min(e1, e2);
    const double hi = std::max(e1, e2);
    if (t < lo) return lo - t;
    if (t > hi) return t - hi;
    return 0.0;
  }
  return c * s != 0.0 ? 0.0 : std::abs(t);
}

ErrorCounts run_batch(const SimConfig& cfg, const ChannelParams& params,
                      const Constellation& x_const, const Constellation& state,
                      const FadingModel& fading, const std::vector<Hypothesis>& hyps,
                      long long n, std::uint64_t batch_seed) {
  detail::Rng rng(batch_seed);
  detail::DiscreteSampler draw_state(state);
  detail::FadingSampler draw_fading(fading);
  const double c = params.c;
  const std::size_t n_x = x_const.points.size();

  ErrorCounts errs;
  for (long long t = 0; t < n; ++t) {
    const std::size_t xi = std::min(
        n_x - 1, static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n_x)));
    const double x = x_const.points[xi];
    const double s = draw_state(rng);
    const double a = draw_fading(rng);
    double z = rng.normal();
    if (cfg.noise_mode == NoiseMode::kResidual) z = residual_noise(z);
    const double y = x + c * a * s + z;

    // Scan hypotheses in lexicographic (x, s) order so the first maximizer /
    // first feasible point is the tie-break winner.
    const Hypothesis* best = nullptr;
    if (cfg.noise_mode == NoiseMode::kGaussian) {
      double best_score = -std::numeric_limits<double>::infinity();
      for (const auto& h : hyps) {
        double score;
        if (cfg.mode == CsiMode::kRcsi) {
          score = -std::abs(y - h.x - c * a * h.s);
        } else {
          score = detail::fading_smear_density(fading, c, h.s, 1.0, y - h.x);
        }
        if (score > best_score) {
          best_score = score;
          best = &h;
        }
      }
    } else {
      for (const auto& h : hyps) {
        const bool ok = cfg.mode == CsiMode::kRcsi
                            ? std::abs(y - h.x - c * a * h.s) <= kResidualBound
                            : residual_feasible(fading, c, h.s, y - h.x);
        if (ok) {
          best = &h;
          break;
        }
      }
      if (best == nullptr) {
        // No feasible hypothesis (cannot happen for the true tuple); fall
        // back to the closest image.
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& h : hyps) {
          const double d = cfg.mode == CsiMode::kRcsi
                               ? std::abs(y - h.x - c * a * h.s)
                               : residual_distance(fading, c, h.s, y - h.x);
          if (d < best_d) {
            best_d = d;
            best = &h;
          }
        }
      }
    }

    const bool x_err = best->x != x;
    const bool s_err = best->s != s;
    errs.input += x_err;
    errs.state += s_err;
    errs.joint += (x_err || s_err);
  }
  return errs;
}

}  // namespace

double wilson_halfwidth(long long errors, long long n, double z) {
  if (n <= 0) return 0.5;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(errors) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  return z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
}

SimResult run_decoding_sim(const SimConfig& cfg, const ChannelParams& params,
                           const Constellation& x_const, const Constellation& state,
                           const FadingModel& fading) {
  params.validate();
  x_const.validate();
  state.validate();
  fading.validate();
  if (cfg.n_symbols < 10000)
    throw std::invalid_argument("run_decoding_sim: n_symbols must be >= 10^4");
  const double peak = std::ceil(std::sqrt(params.P));
  for (double p : x_const.points) {
    if (std::rint(p) != p)
      throw std::invalid_argument("run_decoding_sim: x_const points must be integers");
    if (std::abs(p) > peak + 1e-9)
      throw std::invalid_argument("run_decoding_sim: x_const exceeds the peak limit");
  }

  std::vector<Hypothesis> hyps;
  hyps.reserve(x_const.points.size() * state.points.size());
  for (std::size_t i = 0; i < x_const.points.size(); ++i)
    for (std::size_t j = 0; j < state.points.size(); ++j)
      hyps.push_back(Hypothesis{x_const.points[i], state.points[j], i, j});

  constexpr long long kBatch = 10000;
  const long long n_batches = (cfg.n_symbols + kBatch - 1) / kBatch;
  std::vector<ErrorCounts> per_batch(static_cast<std::size_t>(n_batches));

  auto run_range = [&](long long first, long long last) {
    for (long long b = first; b < last; ++b) {
      const long long n =
          std::min(kBatch, cfg.n_symbols - b * kBatch);
      per_batch[static_cast<std::size_t>(b)] =
          run_batch(cfg, params, x_const, state, fading, hyps, n,
                    detail::mix_seed(cfg.seed, static_cast<std::uint64_t>(b)));
    }
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || n_batches == 1) {
    run_range(0, n_batches);
  } else {
    std::vector<std::thread> pool;
    const long long chunk = (n_batches + jobs - 1) / jobs;
    for (int w = 0; w < jobs; ++w) {
      const long long first = w * chunk;
      const long long last = std::min<long long>(n_batches, first + chunk);
      if (first >= last) break;
      pool.emplace_back(run_range, first, last);
    }
    for (auto& th : pool) th.join();
  }

  ErrorCounts total;
  for (const auto& e : per_batch) total += e;

  SimResult res;
  res.n = cfg.n_symbols;
  res.seed = cfg.seed;
  res.joint_errors = total.joint;
  res.state_errors = total.state;
  res.input_errors = total.input;
  const double nn = static_cast<double>(cfg.n_symbols);
  res.joint_error_rate = static_cast<double>(total.joint) / nn;
  res.state_error_rate = static_cast<double>(total.state) / nn;
  res.input_error_rate = static_cast<double>(total.input) / nn;
  return res;
}

}  // namespace wffd
