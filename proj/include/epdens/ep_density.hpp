#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "epdens/basis.hpp"
#include "epdens/errors.hpp"
#include "epdens/params.hpp"

namespace epdens {

//! Hard-thresholded blockwise shrinkage weight:
//! (E - 1/r) / E if E > (1 + t) / r, else 0.
inline double shrink_weight(double block_mean_energy, double r, double t)
{
  const double noise = 1.0 / r;
  if (block_mean_energy > (1.0 + t) * noise)
    return (block_mean_energy - noise) / block_mean_energy;
  return 0.0;
}

//! Wiener filter weight Theta / (Theta + 1/r).
inline double wiener_weight(double theta, double r)
{
  return theta / (theta + 1.0 / r);
}

//! Expected per-block risk of shrinking a block by mu:
//! r^{-1} L mu^2 (1 - variance_correction) + (1 - mu)^2 L Theta.
//! With variance_correction = 0 (coefficient variance 1/r) the minimiser is
//! wiener_weight(Theta, r).
inline double block_risk(double mu, double theta, double r, double length,
                         double variance_correction = 0.0)
{
  return length * mu * mu * (1.0 - variance_correction) / r +
         (1.0 - mu) * (1.0 - mu) * length * theta;
}

// --------------------------------------------------------------------------
// finite support [0, 1]

//! Blockwise-shrunk cosine series estimate on [0, 1]. Vanishes outside.
class FiniteDensityEstimate
{
public:
  FiniteDensityEstimate() = default;

  FiniteDensityEstimate(BlockScheme scheme, FourierCoefficients coeffs,
                        std::vector<double> energies, std::vector<double> weights)
    : scheme_(std::move(scheme))
    , coeffs_(std::move(coeffs))
    , energies_(std::move(energies))
    , weights_(std::move(weights))
  {}

  const BlockScheme& scheme() const { return scheme_; }
  const FourierCoefficients& coefficients() const { return coeffs_; }
  //! Mean squared coefficient L_k^{-1} sum_{j in B_k} theta_j^2 per block.
  const std::vector<double>& block_energies() const { return energies_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t sample_size() const { return coeffs_.r; }

  //! Series value, also for z outside [0, 1].
  double series(double z) const
  {
    double value = 1.0;
    for (std::size_t k = 0; k < scheme_.block_count(); ++k) {
      if (weights_[k] == 0.0)
        continue;
      double block = 0.0;
      for (std::size_t j = scheme_.lower(k) + 1; j <= scheme_.upper(k); ++j)
        block += coeffs_[j] * cosine_phi(j, z);
      value += weights_[k] * block;
    }
    return value;
  }

  double operator()(double z) const
  {
    if (z < 0.0 || z > 1.0)
      return 0.0;
    return series(z);
  }

  //! int_lo^hi of the estimate, closed form; lo, hi are clamped to [0, 1].
  double integral(double lo = 0.0, double hi = 1.0) const
  {
    lo = std::clamp(lo, 0.0, 1.0);
    hi = std::clamp(hi, 0.0, 1.0);
    double value = hi - lo;
    for (std::size_t k = 0; k < scheme_.block_count(); ++k) {
      if (weights_[k] == 0.0)
        continue;
      double block = 0.0;
      for (std::size_t j = scheme_.lower(k) + 1; j <= scheme_.upper(k); ++j) {
        block += coeffs_[j] *
                 (cosine_phi_antiderivative(j, hi) - cosine_phi_antiderivative(j, lo));
      }
      value += weights_[k] * block;
    }
    return value;
  }

  //! int_0^1 (estimate)^2 by Parseval: 1 + sum_k mu_k^2 sum_{j in B_k} theta_j^2.
  double l2_norm_squared() const
  {
    double value = 1.0;
    for (std::size_t k = 0; k < scheme_.block_count(); ++k)
      value += weights_[k] * weights_[k] * energies_[k] *
               static_cast<double>(scheme_.length(k));
    return value;
  }

private:
  BlockScheme scheme_;
  FourierCoefficients coeffs_;
  std::vector<double> energies_;
  std::vector<double> weights_;
};

namespace detail {

inline std::vector<double> finite_block_energies(const BlockScheme& scheme,
                                                 const FourierCoefficients& coeffs)
{
  std::vector<double> energies(scheme.block_count(), 0.0);
  for (std::size_t k = 0; k < scheme.block_count(); ++k) {
    double sum = 0.0;
    for (std::size_t j = scheme.lower(k) + 1; j <= scheme.upper(k); ++j)
      sum += coeffs[j] * coeffs[j];
    energies[k] = sum / static_cast<double>(scheme.length(k));
  }
  return energies;
}

inline void require_estimator_sample(std::span<const double> sample)
{
  if (sample.size() < 5)
    throw SampleTooSmall("density estimator needs at least 5 observations, got " +
                         std::to_string(sample.size()));
}

} // namespace detail

//! EP estimate for a sample supported on [0, 1].
inline FiniteDensityEstimate fit_finite(std::span<const double> sample)
{
  detail::require_estimator_sample(sample);
  BlockScheme scheme(sample.size(), SupportKind::finite);
  auto coeffs = empirical_fourier_all(sample, scheme.total_length());
  auto energies = detail::finite_block_energies(scheme, coeffs);

  const double r = static_cast<double>(sample.size());
  std::vector<double> weights(scheme.block_count());
  for (std::size_t k = 0; k < scheme.block_count(); ++k)
    weights[k] = shrink_weight(energies[k], r, scheme.threshold(k));

  return {std::move(scheme), std::move(coeffs), std::move(energies), std::move(weights)};
}

//! Wiener super-oracle on [0, 1]: same coefficients as fit_finite, but the
//! weights come from the true coefficients theta_j (true_coeffs[j - 1]).
inline FiniteDensityEstimate fit_finite_wiener(std::span<const double> sample,
                                               std::span<const double> true_coeffs)
{
  detail::require_estimator_sample(sample);
  BlockScheme scheme(sample.size(), SupportKind::finite);
  if (true_coeffs.size() < scheme.total_length())
    throw DomainError("need " + std::to_string(scheme.total_length()) +
                      " true coefficients");
  auto coeffs = empirical_fourier_all(sample, scheme.total_length());
  auto energies = detail::finite_block_energies(scheme, coeffs);

  const double r = static_cast<double>(sample.size());
  std::vector<double> weights(scheme.block_count());
  for (std::size_t k = 0; k < scheme.block_count(); ++k) {
    double theta = 0.0;
    for (std::size_t j = scheme.lower(k) + 1; j <= scheme.upper(k); ++j)
      theta += true_coeffs[j - 1] * true_coeffs[j - 1];
    theta /= static_cast<double>(scheme.length(k));
    weights[k] = wiener_weight(theta, r);
  }
  return {std::move(scheme), std::move(coeffs), std::move(energies), std::move(weights)};
}

// --------------------------------------------------------------------------
// infinite support

//! Blockwise-shrunk characteristic-function estimate on the real line:
//! f(z) = pi^{-1} sum_k mu_k int_{B_k} Re(h(v) exp(-i v z)) dv.
class InfiniteDensityEstimate
{
public:
  InfiniteDensityEstimate() = default;

  InfiniteDensityEstimate(BlockScheme scheme, EmpiricalCF cf,
                          std::vector<double> block_integrals,
                          std::vector<double> weights)
    : scheme_(std::move(scheme))
    , cf_(std::move(cf))
    , integrals_(std::move(block_integrals))
    , weights_(std::move(weights))
  {
    edges_.assign(scheme_.edges().begin(), scheme_.edges().end());
  }

  const BlockScheme& scheme() const { return scheme_; }
  const EmpiricalCF& cf() const { return cf_; }
  //! int_{B_k} |h(v)|^2 dv per block.
  const std::vector<double>& block_integrals() const { return integrals_; }
  //! Block energies L_k^{-1} int_{B_k} |h(v)|^2 dv.
  std::vector<double> block_energies() const
  {
    std::vector<double> e(integrals_.size());
    for (std::size_t k = 0; k < e.size(); ++k)
      e[k] = integrals_[k] / static_cast<double>(scheme_.length(k));
    return e;
  }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t sample_size() const { return cf_.size(); }

  double operator()(double z) const
  {
    bool any = false;
    for (double w : weights_)
      any = any || w != 0.0;
    if (!any)
      return 0.0;
    const auto parts = cf_.inversion_integrals(edges_, z);
    double value = 0.0;
    for (std::size_t k = 0; k < parts.size(); ++k)
      value += weights_[k] * parts[k];
    return value / std::numbers::pi;
  }

  //! L2 norm squared via Plancherel: pi^{-1} sum_k mu_k^2 int_{B_k} |h|^2.
  double l2_norm_squared() const
  {
    double value = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k)
      value += weights_[k] * weights_[k] * integrals_[k];
    return value / std::numbers::pi;
  }

private:
  BlockScheme scheme_;
  EmpiricalCF cf_;
  std::vector<double> integrals_;
  std::vector<double> weights_;
  std::vector<double> edges_;
};

namespace detail {

inline std::vector<double> as_double_edges(const BlockScheme& scheme)
{
  return {scheme.edges().begin(), scheme.edges().end()};
}

} // namespace detail

//! EP estimate for a sample on the real line.
inline InfiniteDensityEstimate fit_infinite(std::span<const double> sample)
{
  detail::require_estimator_sample(sample);
  BlockScheme scheme(sample.size(), SupportKind::infinite);
  EmpiricalCF cf(sample);
  const auto edges = detail::as_double_edges(scheme);
  auto integrals = cf.squared_modulus_integrals(edges);

  const double r = static_cast<double>(sample.size());
  std::vector<double> weights(scheme.block_count());
  for (std::size_t k = 0; k < scheme.block_count(); ++k) {
    const double energy = integrals[k] / static_cast<double>(scheme.length(k));
    weights[k] = shrink_weight(energy, r, scheme.threshold(k));
  }
  return {std::move(scheme), std::move(cf), std::move(integrals), std::move(weights)};
}

//! Wiener super-oracle on the real line; true_energies[k] is
//! L_k^{-1} int_{B_k} |h(v)|^2 dv of the true characteristic function.
inline InfiniteDensityEstimate fit_infinite_wiener(std::span<const double> sample,
                                                   std::span<const double> true_energies)
{
  detail::require_estimator_sample(sample);
  BlockScheme scheme(sample.size(), SupportKind::infinite);
  if (true_energies.size() < scheme.block_count())
    throw DomainError("need " + std::to_string(scheme.block_count()) +
                      " true block energies");
  EmpiricalCF cf(sample);
  auto integrals = cf.squared_modulus_integrals(detail::as_double_edges(scheme));
  const double r = static_cast<double>(sample.size());
  std::vector<double> weights(scheme.block_count());
  for (std::size_t k = 0; k < scheme.block_count(); ++k)
    weights[k] = wiener_weight(true_energies[k], r);
  return {std::move(scheme), std::move(cf), std::move(integrals), std::move(weights)};
}

// --------------------------------------------------------------------------

template <class Estimate>
double evaluate(const Estimate& estimate, double z)
{
  return estimate(z);
}

template <class Estimate>
std::vector<double> evaluate_on(const Estimate& estimate, std::span<const double> grid)
{
  std::vector<double> out;
  out.reserve(grid.size());
  for (double z : grid)
    out.push_back(estimate(z));
  return out;
}

//! Trapezoid rule for tabulated values on a sorted grid.
inline double trapezoid(std::span<const double> grid, std::span<const double> values)
{
  double sum = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    sum += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
  return sum;
}

//! Clips negative values to zero and rescales so the trapezoid integral over
//! the grid is one. Optional post-processing for display.
inline std::vector<double> project_nonnegative(std::span<const double> grid,
                                               std::span<const double> values)
{
  if (grid.size() != values.size() || grid.size() < 2)
    throw GridError("projection needs matching grid and values with >= 2 points");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw GridError("grid must be sorted");

  std::vector<double> out(values.begin(), values.end());
  for (auto& v : out)
    v = std::max(v, 0.0);
  const double mass = trapezoid(grid, out);
  if (!(mass > 0.0))
    throw DegenerateEstimate("estimate has no positive mass on the grid");
  for (auto& v : out)
    v /= mass;
  return out;
}

template <class Estimate>
std::vector<double> nonneg_projection(const Estimate& estimate, std::span<const double> grid)
{
  const auto values = evaluate_on(estimate, grid);
  return project_nonnegative(grid, values);
}

} // namespace epdens
