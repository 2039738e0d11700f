#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "epdens/errors.hpp"
#include "epdens/pipeline.hpp"
#include "epdens/test_functions.hpp"

namespace epdens {

enum class ModelKind
{
  homoscedastic,   //!< Y = m(X) + xi
  heteroscedastic, //!< Y = m(X) + sigma(X) xi
  dependent        //!< Y = m(X) + xi, xi | X = x ~ x f_A + (1 - x) f_B
};

//! What the numerator of the replication ratio is.
enum class Comparison
{
  pinsker_oracle, //!< EP estimate on the true errors
  raw_residuals,  //!< plug-in with the true scale function in place of its estimate
  self            //!< the plug-in estimate itself (control, ratio 1)
};

//! shift + scale * corner(name)(x) on [0, 1].
struct FunctionSpec
{
  std::string name = "uniform";
  double scale = 1.0;
  double shift = 0.0;
};

struct ModelConfig
{
  ModelKind kind = ModelKind::heteroscedastic;
  SupportKind support = SupportKind::finite;
  FunctionSpec regression{"normal", 1.0, 0.0};
  FunctionSpec scale{"monotone", 1.0, 0.0};
  std::string design = "uniform";
  std::string error = "bimodal";      //!< error law; weight x in the dependent model
  std::string error_alt = "normal";   //!< dependent model only, weight 1 - x
  std::size_t n = 50;
  std::uint64_t seed = 0;
  std::size_t grid_points = 0;        //!< 0 selects 1001 (finite) or 2001 (infinite)
  std::optional<double> truncation;   //!< ISE window [-T, T] for infinite support
  Comparison comparison = Comparison::pinsker_oracle;
  bool exact_nuisance = false;        //!< inject true m and sigma into the plug-in
  //! Dependent model only: draw errors from the marginal law independently
  //! of X (the i.i.d. control for the dependent model).
  bool decouple_errors = false;
  SeriesCutoff cutoff = SeriesCutoff::standard;
};

// --------------------------------------------------------------------------
// seeding

//! splitmix64 finaliser.
inline std::uint64_t mix_seed(std::uint64_t z)
{
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

//! Seed of replication `index` under `master`; independent of execution order.
inline std::uint64_t replication_seed(std::uint64_t master, std::uint64_t index)
{
  return mix_seed(mix_seed(master) ^ mix_seed(index + 0x632BE59BD9B4E019ULL));
}

// --------------------------------------------------------------------------
// grids and ISE

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t points)
{
  if (points < 2 || !(hi > lo))
    throw GridError("grid needs >= 2 points and hi > lo");
  std::vector<double> g(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = lo + step * static_cast<double>(i);
  g.back() = hi;
  return g;
}

//! Sample quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> values, double p)
{
  if (values.empty())
    throw EmptySample();
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

//! Default half-width of the infinite-support ISE window:
//! max |Z| + 3 * interquartile range of Z.
inline double default_truncation(std::span<const double> sample)
{
  if (sample.empty())
    throw EmptySample();
  double max_abs = 0.0;
  for (double z : sample)
    max_abs = std::max(max_abs, std::abs(z));
  std::vector<double> v(sample.begin(), sample.end());
  return max_abs + 3.0 * (quantile(v, 0.75) - quantile(v, 0.25));
}

//! Trapezoid-rule integrated squared error of `estimate` against `truth`.
template <class Estimate, class Truth>
double ise(const Estimate& estimate, const Truth& truth, std::span<const double> grid)
{
  if (grid.size() < 2)
    throw GridError("ISE grid needs at least 2 points");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw GridError("ISE grid must be sorted");
  std::vector<double> sq(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = estimate(grid[i]) - truth(grid[i]);
    sq[i] = d * d;
  }
  return trapezoid(grid, sq);
}

inline double ise(const ErrorDensityEstimate& estimate, const std::function<double(double)>& truth,
                  std::span<const double> grid)
{
  return ise([&estimate](double z) { return evaluate(estimate, z); }, truth, grid);
}

// --------------------------------------------------------------------------
// models

struct SimulatedData
{
  ObservationSet observations;
  //! Realised errors: (xi - a)/b in the finite case, xi otherwise, recovered
  //! from Y with the true nuisance functions.
  std::vector<double> errors;
  SupportSpec support;
};

//! A ModelConfig with its functions materialised; cheap to sample from
//! repeatedly.
class Model
{
public:
  explicit Model(ModelConfig config)
    : config_(std::move(config))
    , regression_(corner_density(config_.regression.name))
    , scale_(corner_density(config_.scale.name))
    , design_(corner_density(config_.design))
  {
    if (config_.n < 1)
      throw ConfigError("n must be positive");

    if (config_.kind == ModelKind::heteroscedastic) {
      double lowest = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= 1000; ++i)
        lowest = std::min(lowest, sigma(i / 1000.0));
      if (!(lowest > 0.0))
        throw ConfigError("scale function must be positive on [0, 1]");
      if (config_.support == SupportKind::infinite)
        throw ConfigError("heteroscedastic model is supported with finite support only");
    }
    if (config_.kind == ModelKind::dependent && config_.support == SupportKind::finite)
      throw ConfigError("dependent-error model is supported with infinite support only");
    if (config_.comparison == Comparison::raw_residuals &&
        config_.support != SupportKind::finite)
      throw ConfigError("raw_residuals comparison needs finite support");

    if (config_.support == SupportKind::finite) {
      unit_error_ = corner_density(config_.error);
      // xi = a + b eps has zero mean and unit variance
      const double sd = std::sqrt(unit_error_.variance());
      support_ = SupportSpec::finite(-unit_error_.mean() / sd, 1.0 / sd);
    } else {
      support_ = SupportSpec::infinite();
      line_error_ = real_line_density(config_.error);
      if (config_.kind == ModelKind::dependent) {
        line_error_alt_ = real_line_density(config_.error_alt);
        design_mean_ = design_.mean();
      }
    }
  }

  const ModelConfig& config() const { return config_; }
  const SupportSpec& support() const { return support_; }

  double m(double x) const
  {
    return config_.regression.shift + config_.regression.scale * regression_(x);
  }

  double sigma(double x) const
  {
    if (config_.kind != ModelKind::heteroscedastic)
      return 1.0;
    return config_.scale.shift + config_.scale.scale * scale_(x);
  }

  //! Density of the estimated error variable (eps on [0, 1] for finite
  //! support; the marginal of xi in the dependent model).
  double true_density(double u) const
  {
    if (config_.support == SupportKind::finite)
      return unit_error_(u);
    if (config_.kind == ModelKind::dependent)
      return design_mean_ * line_error_.pdf(u) + (1.0 - design_mean_) * line_error_alt_.pdf(u);
    return line_error_.pdf(u);
  }

  std::function<double(double)> truth() const
  {
    return [this](double u) { return true_density(u); };
  }

  SimulatedData generate(std::uint64_t seed) const
  {
    return generate(seed, config_.n);
  }

  SimulatedData generate(std::uint64_t seed, std::size_t n) const
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SimulatedData data;
    data.support = support_;
    data.observations.reserve(n);
    data.errors.reserve(n);
    for (std::size_t l = 0; l < n; ++l) {
      const double x = design_.sample(rng);
      const double mx = m(x);
      if (config_.support == SupportKind::finite) {
        const double eps = unit_error_.sample(rng);
        const double s = sigma(x);
        const double y = mx + s * (support_.a + support_.b * eps);
        data.observations.push_back({x, y});
        data.errors.push_back(rescale_residual(y, mx, s, support_.a, support_.b));
      } else {
        double xi = 0.0;
        const double w = config_.decouple_errors ? design_mean_ : x;
        if (config_.kind == ModelKind::dependent && !(unif(rng) < w))
          xi = line_error_alt_.sample(rng);
        else
          xi = line_error_.sample(rng);
        const double y = mx + xi;
        data.observations.push_back({x, y});
        data.errors.push_back(y - mx);
      }
    }
    return data;
  }

  std::size_t grid_points() const
  {
    if (config_.grid_points >= 2)
      return config_.grid_points;
    return config_.support == SupportKind::finite ? 1001 : 2001;
  }

  //! ISE grid: [0, 1] for finite support, [-T, T] otherwise with T from
  //! the config or the default rule applied to `sample`.
  std::vector<double> ise_grid(std::span<const double> sample) const
  {
    if (config_.support == SupportKind::finite)
      return uniform_grid(0.0, 1.0, grid_points());
    const double T = config_.truncation ? *config_.truncation : default_truncation(sample);
    return uniform_grid(-T, T, grid_points());
  }

private:
  ModelConfig config_;
  UnitDensity regression_;
  UnitDensity scale_;
  UnitDensity design_;
  SupportSpec support_;
  UnitDensity unit_error_;
  NormalMixture line_error_;
  NormalMixture line_error_alt_;
  double design_mean_ = 0.5;
};

inline SimulatedData generate(const ModelConfig& config)
{
  return Model(config).generate(config.seed);
}

// --------------------------------------------------------------------------
// replications

struct ReplicationResult
{
  std::uint64_t seed = 0;
  double ise_oracle = 0.0;
  double ise_estimate = 0.0;
  double ratio = 0.0; //!< ise_oracle / ise_estimate
};

//! The two estimates a replication compares, plus the residuals behind
//! the plug-in estimate.
struct ReplicationEstimates
{
  ErrorDensityEstimate oracle;
  ErrorDensityEstimate estimate;
  std::vector<double> oracle_sample;
  std::vector<double> estimate_sample;
};

inline ReplicationEstimates replication_estimates(const Model& model, const SimulatedData& data)
{
  const auto& cfg = model.config();
  PipelineOptions options;
  options.cutoff = cfg.cutoff;

  PlugInResult plug;
  if (cfg.exact_nuisance) {
    plug = estimate_error_density_with(
      data.observations, data.support, [&model](double x) { return model.m(x); },
      [&model](double x) { return model.sigma(x); }, options);
  } else {
    plug = estimate_error_density(data.observations, data.support, options);
  }

  ReplicationEstimates out;
  switch (cfg.comparison) {
    case Comparison::pinsker_oracle: {
      const auto range = plug.plan.density;
      out.oracle_sample.assign(data.errors.begin() + static_cast<std::ptrdiff_t>(range.begin),
                               data.errors.begin() + static_cast<std::ptrdiff_t>(range.end));
      out.oracle = pinsker_oracle(data.errors, data.support.kind);
      break;
    }
    case Comparison::raw_residuals: {
      std::function<double(double)> m_hat;
      if (plug.nuisance) {
        const auto fit = *plug.nuisance;
        m_hat = [fit](double x) { return fit.m(x); };
      } else {
        m_hat = [&model](double x) { return model.m(x); };
      }
      auto raw = estimate_error_density_with(
        data.observations, data.support, m_hat,
        [&model](double x) { return model.sigma(x); }, options);
      out.oracle_sample = raw.residuals;
      out.oracle = std::move(raw.estimate);
      break;
    }
    case Comparison::self:
      out.oracle_sample = plug.residuals;
      out.oracle = plug.estimate;
      break;
  }
  out.estimate_sample = std::move(plug.residuals);
  out.estimate = std::move(plug.estimate);
  return out;
}

inline ReplicationResult run_replication(const Model& model, std::uint64_t seed)
{
  const auto data = model.generate(seed);
  const auto est = replication_estimates(model, data);

  std::vector<double> pooled = est.estimate_sample;
  pooled.insert(pooled.end(), est.oracle_sample.begin(), est.oracle_sample.end());
  const auto grid = model.ise_grid(pooled);
  const auto truth = model.truth();

  ReplicationResult r;
  r.seed = seed;
  r.ise_oracle = ise(est.oracle, truth, grid);
  r.ise_estimate = ise(est.estimate, truth, grid);
  if (!(r.ise_estimate > 0.0))
    throw ZeroIse("plug-in estimate has zero ISE; ratio undefined");
  r.ratio = r.ise_oracle / r.ise_estimate;
  return r;
}

inline ReplicationResult run_replication(const ModelConfig& config)
{
  return run_replication(Model(config), config.seed);
}

// --------------------------------------------------------------------------
// Monte Carlo

struct Summary
{
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0; //!< sample standard deviation, 0 for a single value
};

inline Summary summarize(std::span<const double> values)
{
  if (values.empty())
    throw EmptySample();
  Summary s;
  const double count = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / count;
  s.median = quantile(std::vector<double>(values.begin(), values.end()), 0.5);
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values)
      ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (count - 1.0));
  }
  return s;
}

struct SimulationReport
{
  ModelConfig config;
  std::size_t reps = 0;
  std::uint64_t master_seed = 0;
  std::vector<ReplicationResult> replications;
  Summary ratio;
  double mise_oracle = 0.0;
  double mise_estimate = 0.0;
};

inline SimulationReport summarize(const ModelConfig& config, std::uint64_t master_seed,
                                  std::vector<ReplicationResult> reps)
{
  SimulationReport report;
  report.config = config;
  report.reps = reps.size();
  report.master_seed = master_seed;
  std::vector<double> ratios;
  for (const auto& r : reps) {
    ratios.push_back(r.ratio);
    report.mise_oracle += r.ise_oracle;
    report.mise_estimate += r.ise_estimate;
  }
  report.ratio = summarize(ratios);
  report.mise_oracle /= static_cast<double>(reps.size());
  report.mise_estimate /= static_cast<double>(reps.size());
  report.replications = std::move(reps);
  return report;
}

inline unsigned default_threads()
{
  return std::max(1u, std::thread::hardware_concurrency());
}

//! Runs body(i) for i in [0, count) on up to `threads` workers; rethrows the
//! first exception.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, const Body& body)
{
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count)
          return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool)
    th.join();
  if (failure)
    std::rethrow_exception(failure);
}

//! `reps` independent replications seeded from config.seed.
inline SimulationReport monte_carlo(const ModelConfig& config, std::size_t reps,
                                    unsigned threads = default_threads())
{
  if (reps < 1)
    throw ConfigError("reps must be >= 1");
  const Model model(config);
  std::vector<ReplicationResult> results(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    results[i] = run_replication(model, replication_seed(config.seed, i));
  });
  return summarize(config, config.seed, std::move(results));
}

// --------------------------------------------------------------------------
// rate studies

//! Builds a density estimate (as a callable) from directly observed errors.
using DirectEstimator =
  std::function<std::function<double(double)>(std::span<const double>, SupportKind)>;

inline DirectEstimator pinsker_oracle_estimator()
{
  return [](std::span<const double> errors, SupportKind kind) -> std::function<double(double)> {
    auto est = pinsker_oracle(errors, kind);
    return [est = std::move(est)](double z) { return evaluate(est, z); };
  };
}

struct RatePoint
{
  std::size_t n = 0;
  double mise = 0.0;
  double mise_se = 0.0; //!< Monte Carlo standard error
};

struct RateStudy
{
  std::vector<RatePoint> points;
  double slope = 0.0; //!< least-squares slope of ln MISE against ln n
};

//! Least-squares slope of y on x.
inline double ols_slope(std::span<const double> x, std::span<const double> y)
{
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

//! Monte Carlo MISE of a direct-observation estimator for each n, using the
//! error law of `config`, and the log-log slope across n.
inline RateStudy rate_study(const ModelConfig& config, std::span<const std::size_t> n_list,
                            std::size_t reps,
                            const DirectEstimator& estimator = pinsker_oracle_estimator(),
                            unsigned threads = default_threads())
{
  if (n_list.size() < 3)
    throw ConfigError("rate study needs at least 3 sample sizes");
  if (!std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
    throw ConfigError("sample sizes must be strictly increasing");
  if (reps < 1)
    throw ConfigError("reps must be >= 1");

  const Model model(config);
  const auto truth = model.truth();
  RateStudy study;
  std::vector<double> log_n;
  std::vector<double> log_mise;
  for (std::size_t n : n_list) {
    std::vector<double> ises(reps);
    parallel_for(reps, threads, [&](std::size_t i) {
      const auto seed = replication_seed(config.seed ^ mix_seed(n), i);
      const auto data = model.generate(seed, n);
      const auto f = estimator(data.errors, config.support);
      const auto grid = model.ise_grid(data.errors);
      ises[i] = ise(f, truth, grid);
    });
    const auto s = summarize(ises);
    study.points.push_back({n, s.mean, s.sd / std::sqrt(static_cast<double>(reps))});
    log_n.push_back(std::log(static_cast<double>(n)));
    log_mise.push_back(std::log(s.mean));
  }
  study.slope = ols_slope(log_n, log_mise);
  return study;
}

} // namespace epdens
