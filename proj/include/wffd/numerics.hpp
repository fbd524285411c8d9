#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wffd {

// Thrown when an adaptive quadrature runs out of its subdivision budget.
// Carries the best estimate accumulated so far.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate, long long subdivisions_used)
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        subdivisions_used_(subdivisions_used) {}

  double best_estimate() const { return best_estimate_; }
  long long subdivisions_used() const { return subdivisions_used_; }

 private:
  double best_estimate_;
  long long subdivisions_used_;
};

struct MixtureComponent {
  double mean = 0.0;
  double weight = 1.0;
};

// Equal-sigma Gaussian mixture. The channel noise is the only continuous
// smoother in every law handled here, so a common sigma suffices.
struct GaussianMixture {
  std::vector<MixtureComponent> components;
  double sigma = 1.0;

  // Throws std::invalid_argument on non-finite means, negative weights,
  // weights that do not sum to 1 within 1e-12, or sigma <= 0.
  void validate() const;
};

struct IntegrationConfig {
  double abs_tol = 1e-9;
  long long max_subdivisions = 1 << 21;
  // Integration window extends this many sigmas beyond the extreme means.
  double support_clip = 10.0;

  void validate() const;
};

// Standard normal CDF, absolute error below 1e-12. Throws on non-finite x.
double std_normal_cdf(double x);

// Standard normal density.
double std_normal_pdf(double x);

// -sum p*log2(p) with 0*log(0) := 0. Entries must be >= 0 and sum to 1
// within 1e-9, otherwise std::invalid_argument.
double discrete_entropy(std::span<const double> pmf);

// Differential entropy of the mixture in bits via adaptive Simpson
// quadrature over the clipped support. Absolute error <= cfg.abs_tol
// (excluding the clipped tail mass, which the default clip makes
// negligible). Throws ConvergenceError with the best estimate if the
// subdivision budget runs out.
double mixture_entropy(const GaussianMixture& mix, const IntegrationConfig& cfg = {});

// Adaptive Simpson integral of f over [lo, hi]. `budget` counts interval
// splits and is decremented in place, so one budget can be shared across
// several calls. Throws ConvergenceError when the budget is exhausted.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol, long long* budget);

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol, long long max_subdivisions = 1 << 21);

// Panel boundaries for integrands with features near `interior` points
// (means, posterior switch midpoints): cuts at each interior point plus
// subdivision of wide spans into pieces of a few `scale` widths.
std::vector<double> quadrature_cuts(std::span<const double> interior, double scale,
                                    double lo, double hi);

// Adaptive Simpson over consecutive panels of `cuts`, sharing one budget;
// the tolerance is divided across panels. Throws ConvergenceError carrying
// the accumulated estimate when the budget runs out.
double integrate_piecewise(const std::function<double(double)>& f,
                           std::span<const double> cuts, double abs_tol,
                           long long* budget);

// Density evaluator for equal-sigma mixtures with components sorted by
// mean; evaluations skip components further than ~39 sigma from the point.
class MixtureDensity {
 public:
  explicit MixtureDensity(const GaussianMixture& mix);

  double operator()(double y) const;
  double min_mean() const { return means_.empty() ? 0.0 : means_.front(); }
  double max_mean() const { return means_.empty() ? 0.0 : means_.back(); }
  double sigma() const { return sigma_; }

 private:
  std::vector<double> means_;
  std::vector<double> weights_;
  double sigma_;
  double inv_sigma_;
  double norm_;
};

inline constexpr double kLog2E = 1.4426950408889634074;       // 1/ln 2
inline constexpr double kHalfLog2TwoPiE = 2.0470955851806411; // 0.5*log2(2*pi*e)

}  // namespace wffd
