#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "epdens/basis.hpp"

using namespace epdens;

namespace {

std::vector<double> normal_sample(std::size_t r, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::vector<double> out(r);
  for (auto& z : out)
    z = norm(rng);
  return out;
}

// |h(v)|^2 straight from the definition.
double squared_modulus(const std::vector<double>& s, double v)
{
  std::complex<double> h = 0.0;
  for (double z : s)
    h += std::exp(std::complex<double>(0.0, v * z));
  h /= static_cast<double>(s.size());
  return std::norm(h);
}

template <class F>
double simpson(F f, double lo, double hi, int n)
{
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i)
    s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

} // namespace

TEST(Cosine, Examples)
{
  EXPECT_EQ(cosine_phi(0, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(cosine_phi(1, 0.0), std::sqrt(2.0));
  EXPECT_NEAR(cosine_phi(1, 0.5), 0.0, 1e-15);
  // no clipping outside [0, 1]
  EXPECT_NEAR(cosine_phi(2, 1.25), std::sqrt(2.0) * std::cos(2.5 * std::numbers::pi), 1e-15);
}

TEST(Cosine, Orthonormality)
{
  const int m = 10000;
  for (std::size_t i = 0; i <= 20; ++i) {
    for (std::size_t j = i; j <= 20; ++j) {
      double sum = 0.0;
      for (int l = 0; l < m; ++l) {
        const double x = (l + 0.5) / m;
        sum += cosine_phi(i, x) * cosine_phi(j, x);
      }
      EXPECT_NEAR(sum / m, i == j ? 1.0 : 0.0, 1e-3) << i << "," << j;
    }
  }
}

TEST(Cosine, AntiderivativeMatchesQuadrature)
{
  for (std::size_t j = 0; j <= 12; ++j) {
    for (double x : {0.0, 0.17, 0.5, 0.93, 1.0}) {
      const double numeric = simpson([j](double u) { return cosine_phi(j, u); }, 0.0, x, 2000);
      EXPECT_NEAR(cosine_phi_antiderivative(j, x), numeric, 1e-10);
    }
    if (j > 0) {
      EXPECT_EQ(cosine_phi_antiderivative(j, 1.0), 0.0) << j;
    }
  }
}

TEST(Fourier, Examples)
{
  const std::vector<double> quarter = {0.25};
  EXPECT_NEAR(empirical_fourier(quarter, 1), 1.0, 1e-15);
  const std::vector<double> pair = {0.25, 0.75};
  EXPECT_NEAR(empirical_fourier(pair, 1), 0.0, 1e-15);
  const std::vector<double> any = {0.1, 0.7, 0.33, 0.9};
  EXPECT_EQ(empirical_fourier(any, 0), 1.0);
  EXPECT_THROW(empirical_fourier(std::vector<double>{}, 1), EmptySample);
}

TEST(Fourier, BoundedAndLinearInEmpiricalMeasure)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(-0.2, 1.2);
  std::vector<double> a(17);
  std::vector<double> b(40);
  for (auto& z : a)
    z = unif(rng);
  for (auto& z : b)
    z = unif(rng);
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());

  const auto all = empirical_fourier_all(pooled, 30);
  ASSERT_EQ(all.size(), 30u);
  EXPECT_EQ(all.r, pooled.size());
  for (std::size_t j = 1; j <= 30; ++j) {
    EXPECT_LE(std::abs(all[j]), std::sqrt(2.0));
    const double weighted = (17.0 * empirical_fourier(a, j) + 40.0 * empirical_fourier(b, j)) / 57.0;
    EXPECT_NEAR(all[j], weighted, 1e-14);
  }
}

TEST(CharacteristicFunction, Examples)
{
  const std::vector<double> s = {0.3, -1.2, 2.5};
  EXPECT_EQ(empirical_cf(s, 0.0), std::complex<double>(1.0, 0.0));
  const std::vector<double> origin = {0.0};
  EXPECT_EQ(empirical_cf(origin, 7.3), std::complex<double>(1.0, 0.0));
  const std::vector<double> pm = {1.0, -1.0};
  const auto h = empirical_cf(pm, std::numbers::pi);
  EXPECT_NEAR(h.real(), -1.0, 1e-15);
  EXPECT_NEAR(h.imag(), 0.0, 1e-15);
  EXPECT_THROW(EmpiricalCF(std::vector<double>{}), EmptySample);
}

TEST(CharacteristicFunction, HermitianAndBounded)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> freq(-40.0, 40.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = normal_sample(5 + trial * 3, 100 + trial);
    const EmpiricalCF cf(s);
    for (int i = 0; i < 50; ++i) {
      const double v = freq(rng);
      const auto h = cf(v);
      EXPECT_LE(std::abs(h), 1.0 + 1e-15);
      const auto g = cf(-v);
      EXPECT_NEAR(g.real(), h.real(), 1e-14);
      EXPECT_NEAR(g.imag(), -h.imag(), 1e-14);
    }
  }
}

TEST(CharacteristicFunction, BlockIntegralsMatchQuadrature)
{
  const auto s = normal_sample(12, 5);
  const EmpiricalCF cf(s);
  const std::vector<double> edges = {0.0, 1.0, 5.0, 14.0, 30.0};
  const auto sq = cf.squared_modulus_integrals(edges);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double numeric =
      simpson([&](double v) { return squared_modulus(s, v); }, edges[k], edges[k + 1], 20000);
    EXPECT_NEAR(sq[k], numeric, 1e-9) << k;
  }

  for (double z : {-1.3, 0.0, 0.4, 2.2}) {
    const auto inv = cf.inversion_integrals(edges, z);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      const double numeric = simpson(
        [&](double v) {
          return (cf(v) * std::exp(std::complex<double>(0.0, -v * z))).real();
        },
        edges[k], edges[k + 1], 20000);
      EXPECT_NEAR(inv[k], numeric, 1e-9) << k << " z=" << z;
    }
  }
}

TEST(CharacteristicFunction, SincNearZeroArgument)
{
  // w -> 0 limit of int_0^c cos(v w) dv is c
  EXPECT_DOUBLE_EQ(detail::cos_integral_from_zero(3.0, 0.0), 3.0);
  EXPECT_NEAR(detail::cos_integral_from_zero(3.0, 1e-9), 3.0, 1e-12);
  EXPECT_NEAR(detail::cos_integral_from_zero(3.0, 0.7), std::sin(2.1) / 0.7, 1e-14);
}
