#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "epdens/errors.hpp"

namespace epdens {

struct GaussianComponent
{
  double weight = 1.0;
  double mean = 0.0;
  double sd = 1.0;
};

namespace detail {

inline double normal_pdf(double x, double mean, double sd)
{
  const double u = (x - mean) / sd;
  return std::exp(-0.5 * u * u) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double normal_cdf(double x, double mean, double sd)
{
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

//! Composite Simpson rule with `intervals` (even) subintervals.
template <class F>
double simpson(const F& f, double lo, double hi, std::size_t intervals = 20000)
{
  if (intervals % 2 == 1)
    ++intervals;
  const double h = (hi - lo) / static_cast<double>(intervals);
  double sum = f(lo) + f(hi);
  for (std::size_t i = 1; i < intervals; ++i)
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + h * static_cast<double>(i));
  return sum * h / 3.0;
}

} // namespace detail

//! Finite mixture of normals on the real line.
class NormalMixture
{
public:
  NormalMixture() = default;
  explicit NormalMixture(std::vector<GaussianComponent> components)
    : components_(std::move(components))
  {
    double total = 0.0;
    for (const auto& c : components_) {
      if (!(c.weight > 0.0) || !(c.sd > 0.0))
        throw ConfigError("mixture components need positive weight and sd");
      total += c.weight;
    }
    for (auto& c : components_)
      c.weight /= total;
  }

  static NormalMixture standard_normal() { return NormalMixture({{1.0, 0.0, 1.0}}); }

  const std::vector<GaussianComponent>& components() const { return components_; }

  double pdf(double x) const
  {
    double v = 0.0;
    for (const auto& c : components_)
      v += c.weight * detail::normal_pdf(x, c.mean, c.sd);
    return v;
  }

  double cdf(double x) const
  {
    double v = 0.0;
    for (const auto& c : components_)
      v += c.weight * detail::normal_cdf(x, c.mean, c.sd);
    return v;
  }

  double operator()(double x) const { return pdf(x); }

  //! h(v) = E exp(i v X).
  std::complex<double> characteristic(double v) const
  {
    std::complex<double> h = 0.0;
    for (const auto& c : components_)
      h += c.weight * std::exp(std::complex<double>(-0.5 * c.sd * c.sd * v * v, v * c.mean));
    return h;
  }

  double mean() const
  {
    double m = 0.0;
    for (const auto& c : components_)
      m += c.weight * c.mean;
    return m;
  }

  double variance() const
  {
    const double m = mean();
    double v = 0.0;
    for (const auto& c : components_)
      v += c.weight * (c.sd * c.sd + (c.mean - m) * (c.mean - m));
    return v;
  }

  //! Law of scale * X + shift.
  NormalMixture affine(double scale, double shift) const
  {
    auto comps = components_;
    for (auto& c : comps) {
      c.mean = scale * c.mean + shift;
      c.sd = std::abs(scale) * c.sd;
    }
    return NormalMixture(std::move(comps));
  }

  //! Zero mean, unit variance version.
  NormalMixture standardized() const
  {
    const double sd = std::sqrt(variance());
    return affine(1.0 / sd, -mean() / sd);
  }

  template <class Rng>
  double sample(Rng& rng) const
  {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    std::size_t i = 0;
    while (i + 1 < components_.size() && u >= components_[i].weight) {
      u -= components_[i].weight;
      ++i;
    }
    std::normal_distribution<double> norm(components_[i].mean, components_[i].sd);
    return norm(rng);
  }

private:
  std::vector<GaussianComponent> components_;
};

//! Density on [0, 1]: uniform, or a normal mixture restricted to [0, 1] and
//! renormalised. Used for design densities, error densities and (scaled) as
//! regression and scale functions.
class UnitDensity
{
public:
  UnitDensity() = default; // uniform
  explicit UnitDensity(NormalMixture mixture)
    : mixture_(std::move(mixture))
    , uniform_(false)
  {
    mass_ = mixture_.cdf(1.0) - mixture_.cdf(0.0);
  }

  bool is_uniform() const { return uniform_; }
  const NormalMixture& mixture() const { return mixture_; }

  double pdf(double x) const
  {
    if (x < 0.0 || x > 1.0)
      return 0.0;
    return uniform_ ? 1.0 : mixture_.pdf(x) / mass_;
  }

  double operator()(double x) const { return pdf(x); }

  double mean() const
  {
    return uniform_ ? 0.5 : detail::simpson([this](double x) { return x * pdf(x); }, 0.0, 1.0);
  }

  double variance() const
  {
    if (uniform_)
      return 1.0 / 12.0;
    const double m = mean();
    return detail::simpson([this, m](double x) { return (x - m) * (x - m) * pdf(x); }, 0.0, 1.0);
  }

  //! Cosine coefficients theta_j = int_0^1 f phi_j, j = 1..count.
  std::vector<double> cosine_coefficients(std::size_t count) const
  {
    std::vector<double> out(count, 0.0);
    if (uniform_)
      return out;
    for (std::size_t j = 1; j <= count; ++j) {
      const double jd = static_cast<double>(j);
      out[j - 1] = detail::simpson(
        [this, jd](double x) {
          return pdf(x) * std::numbers::sqrt2 * std::cos(std::numbers::pi * jd * x);
        },
        0.0, 1.0, 40000);
    }
    return out;
  }

  //! Rejection from the untruncated mixture.
  template <class Rng>
  double sample(Rng& rng) const
  {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (uniform_)
      return unif(rng);
    for (;;) {
      const double x = mixture_.sample(rng);
      if (x >= 0.0 && x <= 1.0)
        return x;
    }
  }

private:
  NormalMixture mixture_;
  bool uniform_ = true;
  double mass_ = 1.0;
};

//! Corner densities on [0, 1]: uniform, normal, bimodal, strata, delta,
//! monotone. Reconstructions of a classical test suite; the mixture
//! parameters are documented in the README.
inline UnitDensity corner_density(std::string_view name)
{
  if (name == "uniform")
    return UnitDensity();
  if (name == "normal")
    return UnitDensity(NormalMixture({{1.0, 0.5, 0.15}}));
  if (name == "bimodal")
    return UnitDensity(NormalMixture({{0.5, 0.4, 0.12}, {0.5, 0.7, 0.08}}));
  if (name == "strata")
    return UnitDensity(NormalMixture({{0.5, 0.2, 0.06}, {0.5, 0.7, 0.08}}));
  if (name == "delta")
    return UnitDensity(NormalMixture({{1.0, 0.5, 0.02}}));
  if (name == "monotone")
    return UnitDensity(NormalMixture({{1.0, 2.0, 0.8}}));
  throw ConfigError("unknown corner function '" + std::string(name) + "'");
}

//! Error laws on the real line, all with zero mean and unit variance:
//! "normal" is N(0, 1); the corner names give the untruncated mixture of
//! that corner density, standardised.
inline NormalMixture real_line_density(std::string_view name)
{
  if (name == "normal")
    return NormalMixture::standard_normal();
  const auto corner = corner_density(name);
  if (corner.is_uniform())
    throw ConfigError("'uniform' has no real-line counterpart");
  return corner.mixture().standardized();
}

} // namespace epdens
