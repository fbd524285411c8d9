#include "wffd/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wffd {

namespace {

constexpr double kInvSqrtTwoPi = 0.3989422804014326779;

bool nearly_one(double x, double tol) { return std::abs(x - 1.0) <= tol; }

struct AdaptiveState {
  const std::function<double(double)>* f;
  long long* budget;
  bool exhausted = false;
};

double simpson(double h, double fa, double fm, double fb) {
  return (fa + 4.0 * fm + fb) * (h / 6.0);
}

double adapt(AdaptiveState& st, double a, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*st.f)(lm);
  const double frm = (*st.f)(rm);
  const double left = simpson(m - a, fa, flm, fm);
  const double right = simpson(b - m, fm, frm, fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || depth >= 60 || (b - a) < 1e-14 * (1.0 + std::abs(a))) {
    return left + right + delta / 15.0;
  }
  if (*st.budget <= 0) {
    st.exhausted = true;
    return left + right + delta / 15.0;
  }
  *st.budget -= 1;
  return adapt(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adapt(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

void GaussianMixture::validate() const {
  if (components.empty()) throw std::invalid_argument("mixture: no components");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("mixture: sigma must be positive and finite");
  double total = 0.0;
  for (const auto& c : components) {
    if (!std::isfinite(c.mean)) throw std::invalid_argument("mixture: non-finite mean");
    if (!(c.weight >= 0.0)) throw std::invalid_argument("mixture: negative weight");
    total += c.weight;
  }
  if (!nearly_one(total, 1e-12))
    throw std::invalid_argument("mixture: weights must sum to 1 within 1e-12");
}

void IntegrationConfig::validate() const {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("integration: abs_tol must be > 0");
  if (!(support_clip >= 6.0))
    throw std::invalid_argument("integration: support_clip must be >= 6");
  if (max_subdivisions <= 0)
    throw std::invalid_argument("integration: max_subdivisions must be > 0");
}

double std_normal_cdf(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("std_normal_cdf: non-finite input");
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

double std_normal_pdf(double x) { return kInvSqrtTwoPi * std::exp(-0.5 * x * x); }

double discrete_entropy(std::span<const double> pmf) {
  if (pmf.empty()) throw std::invalid_argument("discrete_entropy: empty pmf");
  double total = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("discrete_entropy: entries must be >= 0");
    total += p;
  }
  if (!nearly_one(total, 1e-9))
    throw std::invalid_argument("discrete_entropy: pmf must sum to 1 within 1e-9");
  double h = 0.0;
  for (double p : pmf)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol, long long* budget) {
  if (!(lo <= hi)) throw std::invalid_argument("integrate: lo must be <= hi");
  if (lo == hi) return 0.0;
  AdaptiveState st{&f, budget, false};
  const double fa = f(lo);
  const double fb = f(hi);
  const double m = 0.5 * (lo + hi);
  const double fm = f(m);
  const double whole = simpson(hi - lo, fa, fm, fb);
  const double result = adapt(st, lo, hi, fa, fm, fb, whole, abs_tol, 0);
  if (st.exhausted)
    throw ConvergenceError("integrate: subdivision budget exhausted", result, *budget);
  return result;
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol, long long max_subdivisions) {
  long long budget = max_subdivisions;
  return integrate(f, lo, hi, abs_tol, &budget);
}

MixtureDensity::MixtureDensity(const GaussianMixture& mix) : sigma_(mix.sigma) {
  std::vector<std::size_t> order(mix.components.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mix.components[a].mean < mix.components[b].mean;
  });
  means_.reserve(order.size());
  weights_.reserve(order.size());
  for (std::size_t i : order) {
    means_.push_back(mix.components[i].mean);
    weights_.push_back(mix.components[i].weight);
  }
  inv_sigma_ = 1.0 / sigma_;
  norm_ = kInvSqrtTwoPi * inv_sigma_;
}

double MixtureDensity::operator()(double y) const {
  // exp(-0.5 t^2) underflows past |t| ~ 38.6; skip components out of reach.
  const double reach = 39.0 * sigma_;
  auto first = std::lower_bound(means_.begin(), means_.end(), y - reach);
  auto last = std::upper_bound(means_.begin(), means_.end(), y + reach);
  double acc = 0.0;
  for (auto it = first; it != last; ++it) {
    const double t = (y - *it) * inv_sigma_;
    acc += weights_[static_cast<std::size_t>(it - means_.begin())] * std::exp(-0.5 * t * t);
  }
  return acc * norm_;
}

std::vector<double> quadrature_cuts(std::span<const double> interior, double scale,
                                    double lo, double hi) {
  std::vector<double> points(interior.begin(), interior.end());
  std::sort(points.begin(), points.end());
  std::vector<double> cuts;
  cuts.push_back(lo);
  double prev = lo;
  auto push_span = [&](double from, double to) {
    const double width = to - from;
    if (width <= 0.0) return;
    const int pieces =
        std::min<int>(128, std::max<int>(1, static_cast<int>(width / (4.0 * scale))));
    for (int k = 1; k < pieces; ++k) cuts.push_back(from + width * k / pieces);
    cuts.push_back(to);
  };
  for (double m : points) {
    if (m > prev && m < hi) {
      push_span(prev, m);
      prev = m;
    }
  }
  push_span(prev, hi);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.size() < 2) cuts = {lo, hi};
  return cuts;
}

double integrate_piecewise(const std::function<double(double)>& f,
                           std::span<const double> cuts, double abs_tol,
                           long long* budget) {
  if (cuts.size() < 2) throw std::invalid_argument("integrate_piecewise: need >= 2 cuts");
  const double tol_share = abs_tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  bool exhausted = false;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    try {
      total += integrate(f, cuts[k], cuts[k + 1], tol_share, budget);
    } catch (const ConvergenceError& e) {
      total += e.best_estimate();
      exhausted = true;
    }
  }
  if (exhausted)
    throw ConvergenceError("integrate_piecewise: subdivision budget exhausted", total,
                           budget != nullptr ? *budget : 0);
  return total;
}

double mixture_entropy(const GaussianMixture& mix, const IntegrationConfig& cfg) {
  mix.validate();
  cfg.validate();
  const MixtureDensity density(mix);
  const double lo = density.min_mean() - cfg.support_clip * mix.sigma;
  const double hi = density.max_mean() + cfg.support_clip * mix.sigma;

  auto integrand = [&](double y) {
    const double p = density(y);
    if (p <= 0.0) return 0.0;
    return -p * std::log2(p);
  };

  // Panels split at every component mean; wide gaps between means are cut
  // into sigma-scale pieces so no bump hides inside a coarse first pass.
  std::vector<double> means;
  means.reserve(mix.components.size());
  for (const auto& c : mix.components) means.push_back(c.mean);
  const std::vector<double> cuts = quadrature_cuts(means, mix.sigma, lo, hi);

  long long budget = cfg.max_subdivisions;
  try {
    return integrate_piecewise(integrand, cuts, cfg.abs_tol, &budget);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("mixture_entropy: tolerance not reached within max_subdivisions",
                           e.best_estimate(), cfg.max_subdivisions);
  }
}

}  // namespace wffd
