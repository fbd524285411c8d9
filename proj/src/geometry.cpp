#include "wffd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wffd {

namespace {

long long ncsi_i_limit(double P) {
  return 2 * static_cast<long long>(std::ceil(std::sqrt(P)));
}

long long rcsi_i_limit(double P) {
  return 2 * static_cast<long long>(std::floor(std::sqrt(P)));
}

struct Candidate {
  double gap = std::numeric_limits<double>::infinity();
  ConditionWitness witness;

  void offer(double value, const ConditionWitness& w) {
    if (value < gap) {
      gap = value;
      witness = w;
    }
  }
};

// Minimum of |k0 + ka*a + kb*b| over the box [lo,hi]^2. The expression is
// affine, so extrema sit on corners; a sign change anywhere in the box means
// an interior zero, witnessed by a root on one of the edges.
void min_abs_affine_box(double k0, double ka, double kb, double lo, double hi,
                        long long i, double s, double s_tilde, Candidate& cand) {
  const double corners_a[4] = {lo, lo, hi, hi};
  const double corners_b[4] = {lo, hi, lo, hi};
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -vmin;
  double best_abs = vmin;
  ConditionWitness best_w;
  for (int k = 0; k < 4; ++k) {
    const double v = k0 + ka * corners_a[k] + kb * corners_b[k];
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
    if (std::abs(v) < best_abs) {
      best_abs = std::abs(v);
      best_w = ConditionWitness{i, s, corners_a[k], s_tilde, corners_b[k]};
    }
  }
  if (vmin <= 0.0 && vmax >= 0.0) {
    // Find an exact zero on an edge: fix one variable at an endpoint and
    // solve the remaining affine equation.
    for (double fixed : {lo, hi}) {
      const double num_b = -(k0 + ka * fixed);
      if (kb != 0.0) {
        const double b = num_b / kb;
        if (b >= lo && b <= hi) {
          cand.offer(0.0, ConditionWitness{i, s, fixed, s_tilde, b});
          return;
        }
      }
      const double num_a = -(k0 + kb * fixed);
      if (ka != 0.0) {
        const double a = num_a / ka;
        if (a >= lo && a <= hi) {
          cand.offer(0.0, ConditionWitness{i, s, a, s_tilde, fixed});
          return;
        }
      }
    }
    // Degenerate ka = kb = 0 with k0 = 0.
    cand.offer(0.0, ConditionWitness{i, s, lo, s_tilde, lo});
    return;
  }
  cand.offer(best_abs, best_w);
}

}  // namespace

double ncsi_minimand(double c, const ConditionWitness& w, MinimandForm form) {
  if (form == MinimandForm::kGainBothProducts)
    return std::abs(static_cast<double>(w.i) + c * (w.a * w.s - w.a_tilde * w.s_tilde));
  return std::abs(static_cast<double>(w.i) - c * w.a * w.s - w.a_tilde * w.s_tilde);
}

double rcsi_minimand(double c, const ConditionWitness& w) {
  return std::abs(static_cast<double>(w.i) - c * w.a * (w.s - w.s_tilde));
}

ConditionReport ncsi_min_gap(const ChannelParams& params, const Constellation& state,
                             const FadingModel& fading, MinimandForm form) {
  params.validate();
  state.validate();
  fading.validate();
  ConditionReport report;
  report.mode = CsiMode::kNcsi;
  if (state.points.size() < 2)
    throw std::invalid_argument("ncsi_min_gap: state needs >= 2 points");
  if (std::holds_alternative<GaussianLaw>(fading.law)) {
    report.min_gap = 0.0;
    report.satisfied = false;
    report.note = "gaussian fading has unbounded support; the separation condition cannot hold";
    return report;
  }

  const long long limit = ncsi_i_limit(params.P);
  const double c = params.c;
  Candidate cand;

  auto scan_pair = [&](double s, double s_tilde, long long i) {
    // minimand: i + c*s*a - c*s_tilde*a_tilde (both-products form), or
    //           i - c*s*a -   s_tilde*a_tilde (display form)
    const double ka = (form == MinimandForm::kGainBothProducts) ? c * s : -c * s;
    const double kb = (form == MinimandForm::kGainBothProducts) ? -c * s_tilde : -s_tilde;
    if (fading.is_discrete()) {
      const auto& atoms = fading.discrete_law().points;
      for (double a : atoms)
        for (double at : atoms) {
          const double v = std::abs(static_cast<double>(i) + ka * a + kb * at);
          cand.offer(v, ConditionWitness{i, s, a, s_tilde, at});
        }
    } else {
      const auto& u = std::get<UniformInterval>(fading.law);
      min_abs_affine_box(static_cast<double>(i), ka, kb, u.mean - u.half_width,
                         u.mean + u.half_width, i, s, s_tilde, cand);
    }
  };

  for (std::size_t p = 0; p < state.points.size(); ++p)
    for (std::size_t q = 0; q < p; ++q)  // points ascending: s = points[p] > points[q]
      for (long long i = -limit; i <= limit; ++i)
        scan_pair(state.points[p], state.points[q], i);

  report.min_gap = cand.gap;
  report.witness = cand.witness;
  report.satisfied = cand.gap > 0.5;
  return report;
}

ConditionReport rcsi_min_gap(const ChannelParams& params, const Constellation& state,
                             const FadingModel& fading) {
  params.validate();
  state.validate();
  fading.validate();
  ConditionReport report;
  report.mode = CsiMode::kRcsi;
  if (state.points.size() < 2)
    throw std::invalid_argument("rcsi_min_gap: state needs >= 2 points");
  if (std::holds_alternative<GaussianLaw>(fading.law)) {
    report.min_gap = 0.0;
    report.satisfied = false;
    report.note = "gaussian fading has unbounded support; the separation condition cannot hold";
    return report;
  }

  const long long limit = rcsi_i_limit(params.P);
  const double c = params.c;
  Candidate cand;

  auto scan_pair = [&](double s, double s_tilde, long long i) {
    const double slope = -c * (s - s_tilde);
    if (fading.is_discrete()) {
      for (double a : fading.discrete_law().points) {
        const double v = std::abs(static_cast<double>(i) + slope * a);
        cand.offer(v, ConditionWitness{i, s, a, s_tilde, a});
      }
    } else {
      const auto& u = std::get<UniformInterval>(fading.law);
      const double lo = u.mean - u.half_width;
      const double hi = u.mean + u.half_width;
      const double vlo = static_cast<double>(i) + slope * lo;
      const double vhi = static_cast<double>(i) + slope * hi;
      if ((vlo <= 0.0 && 0.0 <= vhi) || (vhi <= 0.0 && 0.0 <= vlo)) {
        const double a = slope != 0.0 ? -static_cast<double>(i) / slope : lo;
        cand.offer(0.0, ConditionWitness{i, s, a, s_tilde, a});
      } else if (std::abs(vlo) <= std::abs(vhi)) {
        cand.offer(std::abs(vlo), ConditionWitness{i, s, lo, s_tilde, lo});
      } else {
        cand.offer(std::abs(vhi), ConditionWitness{i, s, hi, s_tilde, hi});
      }
    }
  };

  for (std::size_t p = 0; p < state.points.size(); ++p)
    for (std::size_t q = 0; q < p; ++q)
      for (long long i = -limit; i <= limit; ++i)
        scan_pair(state.points[p], state.points[q], i);

  report.min_gap = cand.gap;
  report.witness = cand.witness;
  report.satisfied = cand.gap > 0.5;
  return report;
}

std::vector<PamRegion> pam_uniform_regions(const ChannelParams& params, double c, int m,
                                           double mu_A) {
  params.validate();
  if (m < 2 || m % 2 != 0)
    throw UnsupportedModelError("pam_uniform_regions: m must be even and >= 2");
  const Constellation pam = make_pam(m);
  const long long limit = static_cast<long long>(std::floor(std::sqrt(params.P)));
  const double spread = std::sqrt(3.0);

  std::vector<PamRegion> regions;
  regions.reserve(static_cast<std::size_t>((2 * limit + 1) * m));
  for (long long i = -limit; i <= limit; ++i) {
    for (int j = 0; j < m; ++j) {
      const double s = pam.points[static_cast<std::size_t>(j)];
      const double e1 = static_cast<double>(i) + c * s * (mu_A - spread);
      const double e2 = static_cast<double>(i) + c * s * (mu_A + spread);
      regions.push_back(PamRegion{i, j, s, Interval{std::min(e1, e2), std::max(e1, e2)}});
    }
  }
  return regions;
}

double min_region_gap(std::span<const Interval> regions) {
  if (regions.size() < 2)
    throw std::invalid_argument("min_region_gap: need at least 2 regions");
  std::vector<Interval> sorted(regions.begin(), regions.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double gap = std::numeric_limits<double>::infinity();
  double reach = sorted.front().hi;
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    gap = std::min(gap, std::max(0.0, sorted[k].lo - reach));
    reach = std::max(reach, sorted[k].hi);
  }
  return gap;
}

RegionGapResult pam_region_gap(const std::vector<PamRegion>& regions, double c, int m,
                               double mu_A) {
  RegionGapResult result;
  std::vector<Interval> intervals;
  intervals.reserve(regions.size());
  for (const auto& r : regions) intervals.push_back(r.interval);
  result.gap = min_region_gap(intervals);

  // Ordering premise: sorting by lower endpoint reproduces the lexicographic
  // (input, state) order.
  std::vector<std::size_t> order(regions.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return regions[a].interval.lo < regions[b].interval.lo;
  });
  bool ordered = true;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const auto& cur = regions[order[k]];
    const auto& nxt = regions[order[k + 1]];
    const bool lex_ok = cur.input < nxt.input ||
                        (cur.input == nxt.input && cur.state_index < nxt.state_index);
    if (!lex_ok) {
      ordered = false;
      break;
    }
  }
  result.ordered_premise = ordered;
  if (!ordered) return result;

  // Closed form under the ordering premise: adjacent states within one input
  // column plus the wrap from a column's top state to the next column's
  // bottom state.
  const Constellation pam = make_pam(m);
  const double delta = std::sqrt(3.0 / (static_cast<double>(m) * m - 1.0));
  const double spread = std::sqrt(3.0);
  double cf = std::numeric_limits<double>::infinity();
  for (int j = 0; j + 1 < m; ++j) {
    const double s0 = pam.points[static_cast<std::size_t>(j)];
    const double s1 = pam.points[static_cast<std::size_t>(j + 1)];
    double adjacent;
    if (s0 < 0.0 && s1 > 0.0) {
      adjacent = 2.0 * delta * c * (mu_A - spread);
    } else {
      const double q = std::abs(s0 + s1) / (2.0 * delta);
      adjacent = 2.0 * delta * c * (mu_A - q * spread);
    }
    cf = std::min(cf, adjacent);
  }
  bool multiple_columns = false;
  for (const auto& r : regions)
    if (r.input != regions.front().input) {
      multiple_columns = true;
      break;
    }
  if (multiple_columns) {
    const double top = (m - 1.0) * delta;
    cf = std::min(cf, 1.0 - 2.0 * c * top * (mu_A + spread));
  }
  result.closed_form = std::max(0.0, cf);
  return result;
}

}  // namespace wffd
