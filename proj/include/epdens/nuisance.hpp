#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "epdens/basis.hpp"
#include "epdens/errors.hpp"

namespace epdens {

struct Observation
{
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

using ObservationSet = std::vector<Observation>;

namespace detail {

//! sum_{s <= S} c_s phi_s(x)
inline double cosine_series(std::span<const double> coeffs, double x)
{
  double value = 0.0;
  for (std::size_t s = 0; s < coeffs.size(); ++s)
    value += coeffs[s] * cosine_phi(s, x);
  return value;
}

} // namespace detail

//! Truncated cosine series estimate of the design density, floored at 1/b_n
//! when evaluated.
class DesignDensityFit
{
public:
  DesignDensityFit() = default;
  DesignDensityFit(std::vector<double> coeffs, double floor, std::size_t n_1)
    : coeffs_(std::move(coeffs))
    , floor_(floor)
    , n_1_(n_1)
  {}

  double operator()(double x) const
  {
    return std::max(floor_, detail::cosine_series(coeffs_, x));
  }

  const std::vector<double>& coefficients() const { return coeffs_; }
  double floor() const { return floor_; }
  std::size_t subsample_size() const { return n_1_; }

private:
  std::vector<double> coeffs_;
  double floor_ = 0.0;
  std::size_t n_1_ = 0;
};

class RegressionFit
{
public:
  RegressionFit() = default;
  explicit RegressionFit(std::vector<double> coeffs)
    : coeffs_(std::move(coeffs))
  {}

  double operator()(double x) const { return detail::cosine_series(coeffs_, x); }

  const std::vector<double>& coefficients() const { return coeffs_; }

private:
  std::vector<double> coeffs_;
};

//! Scale estimate: positive-part square root of a variance series, clipped
//! to [1/b_n, b_n].
class ScaleFit
{
public:
  ScaleFit() = default;
  ScaleFit(RegressionFit variance, double lo, double hi)
    : variance_(std::move(variance))
    , lo_(lo)
    , hi_(hi)
  {}

  double operator()(double x) const
  {
    const double root = std::sqrt(std::max(variance_(x), 0.0));
    return std::min(std::max(root, lo_), hi_);
  }

  const RegressionFit& variance() const { return variance_; }
  double lower_clip() const { return lo_; }
  double upper_clip() const { return hi_; }

private:
  RegressionFit variance_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

inline DesignDensityFit fit_design_density(std::span<const double> xs, std::size_t S,
                                           double b_n)
{
  if (xs.empty())
    throw EmptySample();
  for (double x : xs) {
    if (!(x >= 0.0 && x <= 1.0))
      throw PredictorOutOfRange("predictor " + std::to_string(x) + " outside [0, 1]");
  }
  std::vector<double> coeffs(S + 1, 0.0);
  for (std::size_t s = 0; s <= S; ++s) {
    double sum = 0.0;
    for (double x : xs)
      sum += cosine_phi(s, x);
    coeffs[s] = sum / static_cast<double>(xs.size());
  }
  return {std::move(coeffs), 1.0 / b_n, xs.size()};
}

//! kappa_s = n_1^{-1} sum_l Y_l phi_s(X_l) / p(X_l), s = 0..S.
//! `design_density` is any callable x -> p(x) > 0.
template <class DesignDensity>
RegressionFit fit_regression(std::span<const Observation> pairs,
                             const DesignDensity& design_density, std::size_t S)
{
  if (pairs.empty())
    throw EmptySample();
  std::vector<double> coeffs(S + 1, 0.0);
  for (std::size_t s = 0; s <= S; ++s) {
    double sum = 0.0;
    for (const auto& o : pairs)
      sum += o.y / design_density(o.x) * cosine_phi(s, o.x);
    coeffs[s] = sum / static_cast<double>(pairs.size());
  }
  return RegressionFit(std::move(coeffs));
}

template <class Regression, class DesignDensity>
ScaleFit fit_scale(std::span<const Observation> pairs, const Regression& regression,
                   const DesignDensity& design_density, std::size_t S, double b_n)
{
  if (pairs.empty())
    throw EmptySample();
  std::vector<Observation> squared;
  squared.reserve(pairs.size());
  for (const auto& o : pairs) {
    const double e = o.y - regression(o.x);
    squared.push_back({o.x, e * e});
  }
  return {fit_regression(std::span<const Observation>(squared), design_density, S),
          1.0 / b_n, b_n};
}

} // namespace epdens
