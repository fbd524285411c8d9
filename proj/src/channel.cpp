#include "wffd/channel.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "rng.hpp"

namespace wffd {

double Constellation::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) m += points[i] * probs[i];
  return m;
}

double Constellation::variance() const {
  const double m = mean();
  double v = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double d = points[i] - m;
    v += d * d * probs[i];
  }
  return v;
}

void Constellation::validate() const {
  if (points.empty() || points.size() != probs.size())
    throw std::invalid_argument("constellation: points/probs must be nonempty, same length");
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]))
      throw std::invalid_argument("constellation: non-finite point");
    if (i > 0 && !(points[i] > points[i - 1]))
      throw std::invalid_argument("constellation: points must be strictly increasing");
    if (!(probs[i] >= 0.0) || !std::isfinite(probs[i]))
      throw std::invalid_argument("constellation: probs must be >= 0");
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("constellation: probs must sum to 1 within 1e-12");
}

Constellation make_pam(int m) {
  if (m < 2) throw std::invalid_argument("make_pam: m must be >= 2");
  const double delta = std::sqrt(3.0 / (static_cast<double>(m) * m - 1.0));
  Constellation c;
  c.points.reserve(static_cast<std::size_t>(m));
  c.probs.assign(static_cast<std::size_t>(m), 1.0 / m);
  for (int i = 0; i < m; ++i) c.points.push_back((2.0 * i - m + 1.0) * delta);
  return c;
}

FadingModel FadingModel::discrete(Constellation pmf) {
  FadingModel f;
  f.law = std::move(pmf);
  f.validate();
  return f;
}

FadingModel FadingModel::uniform(double mean, double half_width) {
  FadingModel f;
  f.law = UniformInterval{mean, half_width};
  f.validate();
  return f;
}

FadingModel FadingModel::gaussian(double mean, double variance) {
  FadingModel f;
  f.law = GaussianLaw{mean, variance};
  f.validate();
  return f;
}

FadingModel FadingModel::degenerate(double value) {
  FadingModel f;
  f.law = Constellation{{value}, {1.0}};
  return f;
}

double FadingModel::mean() const {
  if (is_discrete()) return discrete_law().mean();
  if (const auto* u = std::get_if<UniformInterval>(&law)) return u->mean;
  return std::get<GaussianLaw>(law).mean;
}

double FadingModel::variance() const {
  if (is_discrete()) return discrete_law().variance();
  if (const auto* u = std::get_if<UniformInterval>(&law))
    return u->half_width * u->half_width / 3.0;
  return std::get<GaussianLaw>(law).variance;
}

void FadingModel::validate() const {
  if (is_discrete()) {
    discrete_law().validate();
    return;
  }
  if (const auto* u = std::get_if<UniformInterval>(&law)) {
    if (!(u->half_width > 0.0) || !std::isfinite(u->half_width) || !std::isfinite(u->mean))
      throw std::invalid_argument("fading: uniform half_width must be > 0 and finite");
    return;
  }
  const auto& g = std::get<GaussianLaw>(law);
  if (!(g.variance > 0.0) || !std::isfinite(g.variance) || !std::isfinite(g.mean))
    throw std::invalid_argument("fading: gaussian variance must be > 0 and finite");
}

void ChannelParams::validate() const {
  if (!(P > 0.0) || !std::isfinite(P))
    throw std::invalid_argument("channel: P must be > 0 and finite");
  if (!std::isfinite(c)) throw std::invalid_argument("channel: c must be finite");
}

Constellation standardize(const Constellation& raw) {
  raw.validate();
  const double var = raw.variance();
  if (!(var > 0.0)) throw std::invalid_argument("standardize: zero variance");
  const double mu = raw.mean();
  const double inv_sd = 1.0 / std::sqrt(var);
  Constellation out = raw;
  for (double& p : out.points) p = (p - mu) * inv_sd;
  return out;
}

FadingModel standardize(const FadingModel& raw) {
  raw.validate();
  const double var = raw.variance();
  if (!(var > 0.0)) throw std::invalid_argument("standardize: zero variance");
  const double inv_sd = 1.0 / std::sqrt(var);
  FadingModel out = raw;
  if (out.is_discrete()) {
    auto& law = std::get<Constellation>(out.law);
    for (double& p : law.points) p *= inv_sd;
  } else if (auto* u = std::get_if<UniformInterval>(&out.law)) {
    u->mean *= inv_sd;
    u->half_width *= inv_sd;
  } else {
    auto& g = std::get<GaussianLaw>(out.law);
    g.mean *= inv_sd;
    g.variance = 1.0;
  }
  return out;
}

double residual_noise(double z) { return z - std::round(2.0 * z) * 0.5; }

BlockSample sample_block(const ChannelParams& params, const Constellation& state,
                         const FadingModel& fading, std::span<const double> x,
                         NoiseMode noise_mode, std::uint64_t seed) {
  params.validate();
  state.validate();
  fading.validate();
  for (double xi : x)
    if (!std::isfinite(xi)) throw std::invalid_argument("sample_block: non-finite input");

  detail::Rng rng(detail::mix_seed(seed, 0));
  detail::DiscreteSampler draw_state(state);
  detail::FadingSampler draw_fading(fading);

  BlockSample out;
  out.y.reserve(x.size());
  out.a.reserve(x.size());
  out.s.reserve(x.size());
  for (double xi : x) {
    const double s = draw_state(rng);
    const double a = draw_fading(rng);
    double z = rng.normal();
    if (noise_mode == NoiseMode::kResidual) z = residual_noise(z);
    out.s.push_back(s);
    out.a.push_back(a);
    out.y.push_back(xi + params.c * a * s + z);
  }
  return out;
}

}  // namespace wffd
