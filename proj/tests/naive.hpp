#pragma once

// Straight-line reimplementations used as test oracles. Deliberately
// written without the library's helpers.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace naive {

// Naive finite-support estimator written straight from the formulas.
struct FiniteEstimate
{
  std::vector<double> theta;
  std::vector<std::size_t> edges;
  std::vector<double> mu;

  explicit FiniteEstimate(const std::vector<double>& z)
  {
    const double r = static_cast<double>(z.size());
    const double target = std::pow(r, 0.2) * (4.0 + std::log(std::log(r + 20.0)));
    edges = {0};
    for (std::size_t k = 1; static_cast<double>(edges.back()) < target; ++k)
      edges.push_back(edges.back() + k * k);
    theta.assign(edges.back() + 1, 0.0);
    for (std::size_t j = 1; j <= edges.back(); ++j) {
      for (double x : z)
        theta[j] += std::sqrt(2.0) * std::cos(std::numbers::pi * j * x);
      theta[j] /= r;
    }
    for (std::size_t k = 1; k < edges.size(); ++k) {
      double e = 0.0;
      for (std::size_t j = edges[k - 1] + 1; j <= edges[k]; ++j)
        e += theta[j] * theta[j];
      e /= static_cast<double>(k * k);
      const double t = std::pow(std::log(2.0 + k), -2.0);
      mu.push_back(e > (1.0 + t) / r ? (e - 1.0 / r) / e : 0.0);
    }
  }

  double operator()(double x) const
  {
    double f = 1.0;
    for (std::size_t k = 1; k < edges.size(); ++k)
      for (std::size_t j = edges[k - 1] + 1; j <= edges[k]; ++j)
        f += mu[k - 1] * theta[j] * std::sqrt(2.0) * std::cos(std::numbers::pi * j * x);
    return f;
  }
};


// Split-sample plug-in for finite support [a, a + b], model
// Y = m(X) + sigma(X) xi, evaluated from the raw definitions.
struct FinitePlugIn
{
  std::vector<double> residuals;
  std::vector<double> p, kappa, tau;
  double bn = 0.0;

  FinitePlugIn(const std::vector<double>& x, const std::vector<double>& y, double a, double b)
  {
    const std::size_t n = x.size();
    bn = 4.0 + std::log(std::log(n + 20.0));
    std::size_t n1 = 0;
    while (static_cast<double>(n1) <= n / bn)
      ++n1;
    std::size_t S = 0;
    while (S * S * S <= n)
      ++S;

    auto phi = [](std::size_t s, double u) {
      return s == 0 ? 1.0 : std::sqrt(2.0) * std::cos(std::numbers::pi * s * u);
    };
    auto series = [&](const std::vector<double>& c, double u) {
      double v = 0.0;
      for (std::size_t s = 0; s < c.size(); ++s)
        v += c[s] * phi(s, u);
      return v;
    };

    p.assign(S + 1, 0.0);
    kappa.assign(S + 1, 0.0);
    tau.assign(S + 1, 0.0);
    for (std::size_t s = 0; s <= S; ++s) {
      for (std::size_t l = 0; l < n1; ++l)
        p[s] += phi(s, x[l]);
      p[s] /= n1;
    }
    auto p_hat = [&](double u) { return std::max(1.0 / bn, series(p, u)); };
    for (std::size_t s = 0; s <= S; ++s) {
      for (std::size_t l = n1; l < 2 * n1; ++l)
        kappa[s] += y[l] * phi(s, x[l]) / p_hat(x[l]);
      kappa[s] /= n1;
    }
    for (std::size_t s = 0; s <= S; ++s) {
      for (std::size_t l = 2 * n1; l < 3 * n1; ++l) {
        const double e = y[l] - series(kappa, x[l]);
        tau[s] += e * e * phi(s, x[l]) / p_hat(x[l]);
      }
      tau[s] /= n1;
    }
    for (std::size_t l = 3 * n1; l < n; ++l) {
      const double m = series(kappa, x[l]);
      double sd = std::sqrt(std::max(0.0, series(tau, x[l])));
      sd = std::min(std::max(sd, 1.0 / bn), bn);
      residuals.push_back(((y[l] - m) / sd - a) / b);
    }
  }
};

} // namespace naive
