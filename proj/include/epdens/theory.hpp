#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <variant>

#include "epdens/errors.hpp"

namespace epdens {

//! Sobolev ellipsoid on [0, 1]: sum_j (1 + (pi j)^{2 alpha}) theta_j^2 <= Q.
struct SobolevClass
{
  double alpha = 2.0;
  double Q = 1.0;
};

//! Analytic class on [0, 1]: sum_j (1 + exp(2 pi gamma j)) theta_j^2 <= Q.
struct AnalyticClass
{
  double gamma = 1.0;
  double Q = 1.0;
};

//! Pinsker's constant
//! P(alpha, Q) = (2 alpha + 1) [pi (2 alpha + 1)(alpha + 1) / alpha]^{-2 alpha/(2 alpha + 1)}
//!               Q^{1/(2 alpha + 1)}.
inline double pinsker_constant(double alpha, double Q)
{
  if (!(alpha > 0.0) || !(Q > 0.0))
    throw DomainError("pinsker_constant needs alpha > 0 and Q > 0");
  const double p = 2.0 * alpha + 1.0;
  const double base = std::numbers::pi * p * (alpha + 1.0) / alpha;
  return p * std::pow(base, -2.0 * alpha / p) * std::pow(Q, 1.0 / p);
}

//! Sharp normalising factor over S(alpha, Q): sqrt(n^{2 alpha/(2 alpha + 1)} / P(alpha, Q)).
inline double sobolev_rate_factor(double n, double alpha, double Q)
{
  if (!(n >= 1.0))
    throw DomainError("sobolev_rate_factor needs n >= 1");
  const double p = 2.0 * alpha + 1.0;
  return std::sqrt(std::pow(n, 2.0 * alpha / p) / pinsker_constant(alpha, Q));
}

//! Sharp normalising factor over A(gamma, Q): sqrt(2 pi gamma n / ln n).
inline double analytic_rate_factor(double n, double gamma)
{
  if (!(n >= 2.0) || !(gamma > 0.0))
    throw DomainError("analytic_rate_factor needs n >= 2 and gamma > 0");
  return std::sqrt(2.0 * std::numbers::pi * gamma * n / std::log(n));
}

//! Membership functional of the class; coeffs[j - 1] is theta_j.
inline double class_norm(std::span<const double> coeffs, const SobolevClass& cls)
{
  double sum = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double j = static_cast<double>(i + 1);
    sum += (1.0 + std::pow(std::numbers::pi * j, 2.0 * cls.alpha)) * coeffs[i] * coeffs[i];
  }
  return sum;
}

inline double class_norm(std::span<const double> coeffs, const AnalyticClass& cls)
{
  double sum = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double j = static_cast<double>(i + 1);
    sum += (1.0 + std::exp(2.0 * std::numbers::pi * cls.gamma * j)) * coeffs[i] * coeffs[i];
  }
  return sum;
}

using FunctionClass = std::variant<SobolevClass, AnalyticClass>;

inline double class_norm(std::span<const double> coeffs, const FunctionClass& cls)
{
  return std::visit([coeffs](const auto& c) { return class_norm(coeffs, c); }, cls);
}

} // namespace epdens
