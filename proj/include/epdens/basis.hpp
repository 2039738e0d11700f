#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "epdens/errors.hpp"

namespace epdens {

namespace detail {

//! sin(pi x), exact at integer and half-integer arguments.
inline double sin_pi(double x)
{
  double r = std::fmod(x, 2.0); // exact
  if (r < 0.0)
    r += 2.0;
  if (r == 0.0 || r == 1.0)
    return 0.0;
  if (r == 0.5)
    return 1.0;
  if (r == 1.5)
    return -1.0;
  return std::sin(std::numbers::pi * r);
}

//! sin(x) / x with the removable singularity filled in.
inline double sinc(double x)
{
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

//! int_0^c cos(v w) dv = c sinc(c w).
inline double cos_integral_from_zero(double c, double w)
{
  return c * sinc(c * w);
}

inline void require_nonempty(std::span<const double> sample)
{
  if (sample.empty())
    throw EmptySample();
}

} // namespace detail

//! Cosine basis on [0, 1]: phi_0 = 1, phi_j(x) = sqrt(2) cos(pi j x).
//! Arguments outside [0, 1] are evaluated without clipping.
inline double cosine_phi(std::size_t j, double x)
{
  if (j == 0)
    return 1.0;
  return std::numbers::sqrt2 * std::cos(std::numbers::pi * static_cast<double>(j) * x);
}

//! int_0^x phi_j(u) du in closed form; vanishes exactly at x = 1 for j >= 1.
inline double cosine_phi_antiderivative(std::size_t j, double x)
{
  if (j == 0)
    return x;
  const double jd = static_cast<double>(j);
  return std::numbers::sqrt2 * detail::sin_pi(jd * x) / (std::numbers::pi * jd);
}

struct FourierCoefficients
{
  //! values[j - 1] holds the coefficient of phi_j, j = 1..J.
  std::vector<double> values;
  std::size_t r = 0;

  double operator[](std::size_t j) const { return values.at(j - 1); }
  std::size_t size() const { return values.size(); }
};

//! theta_j = r^{-1} sum_l phi_j(Z_l).
inline double empirical_fourier(std::span<const double> sample, std::size_t j)
{
  detail::require_nonempty(sample);
  double sum = 0.0;
  for (double z : sample)
    sum += cosine_phi(j, z);
  return sum / static_cast<double>(sample.size());
}

inline FourierCoefficients empirical_fourier_all(std::span<const double> sample,
                                                 std::size_t count)
{
  detail::require_nonempty(sample);
  FourierCoefficients out;
  out.r = sample.size();
  out.values.reserve(count);
  for (std::size_t j = 1; j <= count; ++j)
    out.values.push_back(empirical_fourier(sample, j));
  return out;
}

//! Empirical characteristic function h(v) = r^{-1} sum_l exp(i v Z_l).
//!
//! The frequency integrals used by the infinite-support estimator are
//! evaluated from antiderivatives of cos, so they carry no quadrature error.
class EmpiricalCF
{
public:
  EmpiricalCF() = default;

  explicit EmpiricalCF(std::span<const double> sample)
    : sample_(sample.begin(), sample.end())
  {
    detail::require_nonempty(sample);
  }

  std::complex<double> operator()(double v) const
  {
    double re = 0.0;
    double im = 0.0;
    for (double z : sample_) {
      re += std::cos(v * z);
      im += std::sin(v * z);
    }
    const double r = static_cast<double>(sample_.size());
    return {re / r, im / r};
  }

  const std::vector<double>& sample() const { return sample_; }
  std::size_t size() const { return sample_.size(); }

  //! int_{lo}^{hi} |h(v)|^2 dv for each consecutive pair of edges, i.e.
  //! out[k] = int_{edges[k]}^{edges[k+1]} |h|^2.
  //! Uses |h(v)|^2 = r^{-2} sum_{l,m} cos(v (Z_l - Z_m)).
  std::vector<double> squared_modulus_integrals(std::span<const double> edges) const
  {
    const std::size_t blocks = edges.size() - 1;
    std::vector<double> out(blocks, 0.0);
    std::vector<double> prim(edges.size());
    const std::size_t r = sample_.size();
    for (std::size_t l = 0; l < r; ++l) {
      for (std::size_t m = l + 1; m < r; ++m) {
        const double d = sample_[l] - sample_[m];
        for (std::size_t e = 0; e < edges.size(); ++e)
          prim[e] = detail::cos_integral_from_zero(edges[e], d);
        for (std::size_t k = 0; k < blocks; ++k)
          out[k] += 2.0 * (prim[k + 1] - prim[k]);
      }
    }
    const double rd = static_cast<double>(r);
    for (std::size_t k = 0; k < blocks; ++k) {
      // diagonal terms l == m contribute (hi - lo) each
      out[k] += rd * (edges[k + 1] - edges[k]);
      out[k] /= rd * rd;
    }
    return out;
  }

  //! int_{lo}^{hi} Re(h(v) exp(-i v z)) dv for consecutive edge pairs.
  std::vector<double> inversion_integrals(std::span<const double> edges, double z) const
  {
    const std::size_t blocks = edges.size() - 1;
    std::vector<double> out(blocks, 0.0);
    std::vector<double> prim(edges.size());
    for (double s : sample_) {
      const double w = s - z;
      for (std::size_t e = 0; e < edges.size(); ++e)
        prim[e] = detail::cos_integral_from_zero(edges[e], w);
      for (std::size_t k = 0; k < blocks; ++k)
        out[k] += prim[k + 1] - prim[k];
    }
    for (auto& o : out)
      o /= static_cast<double>(sample_.size());
    return out;
  }

private:
  std::vector<double> sample_;
};

inline std::complex<double> empirical_cf(std::span<const double> sample, double v)
{
  return EmpiricalCF(sample)(v);
}

} // namespace epdens
