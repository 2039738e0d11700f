#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "epdens/ep_density.hpp"
#include "epdens/errors.hpp"
#include "epdens/nuisance.hpp"
#include "epdens/params.hpp"

namespace epdens {

//! Error support. Finite support is [a, a + b]; the estimator works with
//! the rescaled variable (xi - a) / b on [0, 1].
struct SupportSpec
{
  SupportKind kind = SupportKind::infinite;
  double a = 0.0;
  double b = 1.0;

  static SupportSpec finite(double a, double b)
  {
    if (!(b > 0.0))
      throw DomainError("finite support width must be positive");
    return {SupportKind::finite, a, b};
  }
  static SupportSpec infinite() { return {SupportKind::infinite, 0.0, 1.0}; }
};

//! Zero-based half-open index range into an ObservationSet.
struct IndexRange
{
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct SplitPlan
{
  SupportKind kind = SupportKind::finite;
  IndexRange design;
  IndexRange regression;
  IndexRange scale; //!< empty for infinite support
  IndexRange density;
};

inline SplitPlan split(const TuningSequences& seq, SupportKind kind)
{
  const std::size_t n = seq.n;
  const std::size_t n1 = seq.n_1;
  SplitPlan plan;
  plan.kind = kind;
  plan.design = {0, n1};
  plan.regression = {n1, 2 * n1};
  if (kind == SupportKind::finite) {
    plan.scale = {2 * n1, 3 * n1};
    plan.density = {3 * n1, n};
  } else {
    // residuals are the last 2 n_1 observations
    if (n < 4 * n1)
      throw OverlapError("residual range of size 2 n_1 = " + std::to_string(2 * n1) +
                         " overlaps the nuisance subsamples for n = " + std::to_string(n));
    plan.scale = {2 * n1, 2 * n1};
    plan.density = {n - 2 * n1, n};
  }
  return plan;
}

inline SplitPlan split(std::size_t n, SupportKind kind)
{
  return split(compute_sequences(n), kind);
}

namespace detail {

inline std::span<const Observation> slice(const ObservationSet& obs, IndexRange range)
{
  return std::span<const Observation>(obs).subspan(range.begin, range.size());
}

} // namespace detail

//! ((y - m) / s - a) / b: the rescaled residual (y - m)/(b s) - a/b.
inline double rescale_residual(double y, double m, double s, double a, double b)
{
  return ((y - m) / s - a) / b;
}

template <class Regression, class Scale>
std::vector<double> rescaled_residuals(const ObservationSet& obs, const Regression& m_hat,
                                       const Scale& sigma_hat, const SupportSpec& support,
                                       const SplitPlan& plan)
{
  if (plan.kind != SupportKind::finite || support.kind != SupportKind::finite)
    throw ConfigError("rescaled residuals need a finite-support plan");
  std::vector<double> out;
  out.reserve(plan.density.size());
  for (const auto& o : detail::slice(obs, plan.density))
    out.push_back(rescale_residual(o.y, m_hat(o.x), sigma_hat(o.x), support.a, support.b));
  return out;
}

template <class Regression>
std::vector<double> residuals(const ObservationSet& obs, const Regression& m_hat,
                              const SplitPlan& plan)
{
  std::vector<double> out;
  out.reserve(plan.density.size());
  for (const auto& o : detail::slice(obs, plan.density))
    out.push_back(o.y - m_hat(o.x));
  return out;
}

using ErrorDensityEstimate = std::variant<FiniteDensityEstimate, InfiniteDensityEstimate>;

inline double evaluate(const ErrorDensityEstimate& estimate, double z)
{
  return std::visit([z](const auto& e) { return e(z); }, estimate);
}

inline std::vector<double> evaluate_on(const ErrorDensityEstimate& estimate,
                                       std::span<const double> grid)
{
  return std::visit([grid](const auto& e) { return evaluate_on(e, grid); }, estimate);
}

inline ErrorDensityEstimate fit_error_density(std::span<const double> sample, SupportKind kind)
{
  if (kind == SupportKind::finite)
    return fit_finite(sample);
  return fit_infinite(sample);
}

//! The fitted nuisance functions of one plug-in run.
struct FittedNuisance
{
  DesignDensityFit design;
  RegressionFit regression;
  std::optional<ScaleFit> scale;

  double m(double x) const { return regression(x); }
  double sigma(double x) const { return scale ? (*scale)(x) : 1.0; }
};

struct PipelineOptions
{
  SeriesCutoff cutoff = SeriesCutoff::standard;
};

struct PlugInResult
{
  ErrorDensityEstimate estimate;
  TuningSequences sequences;
  SplitPlan plan;
  std::vector<double> residuals;
  std::optional<FittedNuisance> nuisance; //!< absent when nuisance was injected
  //! Rescaled residuals outside [0, 1] (finite support only).
  std::size_t outside_unit_interval = 0;
};

inline void validate_observations(const ObservationSet& obs)
{
  for (const auto& o : obs) {
    if (!(o.x >= 0.0 && o.x <= 1.0))
      throw PredictorOutOfRange("predictor " + std::to_string(o.x) + " outside [0, 1]");
  }
}

inline FittedNuisance fit_nuisance(const ObservationSet& obs, const TuningSequences& seq,
                                   const SplitPlan& plan)
{
  FittedNuisance fit;
  std::vector<double> xs;
  xs.reserve(plan.design.size());
  for (const auto& o : detail::slice(obs, plan.design))
    xs.push_back(o.x);
  fit.design = fit_design_density(xs, seq.S, seq.b_n);
  fit.regression = fit_regression(detail::slice(obs, plan.regression), fit.design, seq.S);
  if (plan.kind == SupportKind::finite) {
    fit.scale = fit_scale(detail::slice(obs, plan.scale), fit.regression, fit.design,
                          seq.S, seq.b_n);
  }
  return fit;
}

namespace detail {

template <class Regression, class Scale>
PlugInResult plug_in(const ObservationSet& obs, const SupportSpec& support,
                     const TuningSequences& seq, const SplitPlan& plan,
                     const Regression& m_hat, const Scale& sigma_hat)
{
  PlugInResult result;
  result.sequences = seq;
  result.plan = plan;
  if (support.kind == SupportKind::finite) {
    result.residuals = rescaled_residuals(obs, m_hat, sigma_hat, support, plan);
    result.outside_unit_interval = static_cast<std::size_t>(
      std::count_if(result.residuals.begin(), result.residuals.end(),
                    [](double e) { return e < 0.0 || e > 1.0; }));
  } else {
    result.residuals = residuals(obs, m_hat, plan);
  }
  result.estimate = fit_error_density(result.residuals, support.kind);
  return result;
}

} // namespace detail

//! Plug-in error density estimate: split, fit the nuisance functions, build
//! (rescaled) residuals and run the EP estimator on them.
inline PlugInResult estimate_error_density(const ObservationSet& obs,
                                           const SupportSpec& support,
                                           const PipelineOptions& options = {})
{
  validate_observations(obs);
  const auto seq = compute_sequences(obs.size(), options.cutoff);
  const auto plan = split(seq, support.kind);
  auto fit = fit_nuisance(obs, seq, plan);
  auto result = detail::plug_in(
    obs, support, seq, plan, [&fit](double x) { return fit.m(x); },
    [&fit](double x) { return fit.sigma(x); });
  result.nuisance = std::move(fit);
  return result;
}

//! Plug-in estimate with caller-supplied nuisance functions in place of the
//! fitted ones (exact-nuisance runs). For infinite support `sigma` is ignored.
template <class Regression, class Scale>
PlugInResult estimate_error_density_with(const ObservationSet& obs,
                                         const SupportSpec& support,
                                         const Regression& m, const Scale& sigma,
                                         const PipelineOptions& options = {})
{
  validate_observations(obs);
  const auto seq = compute_sequences(obs.size(), options.cutoff);
  const auto plan = split(seq, support.kind);
  return detail::plug_in(obs, support, seq, plan, m, sigma);
}

//! The index range of the error vector the plug-in estimator mirrors: the
//! last n_2 (finite) or last 2 n_1 (infinite) entries.
inline IndexRange oracle_range(std::size_t n, SupportKind kind)
{
  return split(compute_sequences(n), kind).density;
}

//! EP estimate fitted on the true errors (rescaled errors in [0, 1] for
//! finite support), restricted to the subvector the plug-in estimator uses.
inline ErrorDensityEstimate pinsker_oracle(std::span<const double> errors, SupportKind kind)
{
  const auto range = oracle_range(errors.size(), kind);
  return fit_error_density(errors.subspan(range.begin, range.size()), kind);
}

//! Copy of obs in a seeded random order, for datasets sorted by predictor.
inline ObservationSet shuffled(ObservationSet obs, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::shuffle(obs.begin(), obs.end(), rng);
  return obs;
}

} // namespace epdens
