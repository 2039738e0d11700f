#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "epdens/errors.hpp"

namespace epdens {

enum class SupportKind
{
  finite,
  infinite
};

inline const char* to_string(SupportKind kind)
{
  return kind == SupportKind::finite ? "finite" : "infinite";
}

//! Cutoff rule for the nuisance series estimators.
enum class SeriesCutoff
{
  standard, //!< smallest integer strictly greater than n^{1/3}
  inflated  //!< ceil(n^{1/3} ln(b_n)), undersmoothing variant
};

//! Slow-growth factor b_n = 4 + ln ln(n + 20).
inline double slow_growth(double n)
{
  return 4.0 + std::log(std::log(n + 20.0));
}

struct TuningSequences
{
  std::size_t n = 0;
  double b_n = 0.0;
  std::size_t n_1 = 0; //!< nuisance subsample size
  std::size_t n_2 = 0; //!< finite-support residual count, n - 3 n_1
  std::size_t S = 0;   //!< nuisance series cutoff
};

namespace detail {

//! Smallest integer strictly greater than x (x >= 0).
inline std::size_t next_integer_above(double x)
{
  return static_cast<std::size_t>(std::floor(x)) + 1;
}

//! Smallest s with s^3 > n, computed in integer arithmetic so perfect cubes
//! are handled exactly.
inline std::size_t cube_root_strict_ceiling(std::size_t n)
{
  auto s = static_cast<std::size_t>(std::cbrt(static_cast<double>(n)));
  while (s > 0 && s * s * s > n)
    --s;
  while (s * s * s <= n)
    ++s;
  return s;
}

} // namespace detail

inline TuningSequences compute_sequences(std::size_t n,
                                         SeriesCutoff cutoff = SeriesCutoff::standard)
{
  if (n < 1)
    throw SampleTooSmall("sample size must be positive");

  TuningSequences seq;
  seq.n = n;
  seq.b_n = slow_growth(static_cast<double>(n));
  seq.n_1 = detail::next_integer_above(static_cast<double>(n) / seq.b_n);

  const std::size_t used = 3 * seq.n_1;
  seq.n_2 = used < n ? n - used : 0;
  if (seq.n_1 <= 4 || seq.n_2 <= 4 || used >= n) {
    throw SampleTooSmall("n = " + std::to_string(n) + " gives n_1 = " +
                         std::to_string(seq.n_1) + ", n_2 = " +
                         (used < n ? std::to_string(seq.n_2)
                                   : std::string("<= 0")) +
                         "; both must exceed 4");
  }

  if (cutoff == SeriesCutoff::standard) {
    seq.S = detail::cube_root_strict_ceiling(n);
  } else {
    seq.S = static_cast<std::size_t>(
      std::ceil(std::cbrt(static_cast<double>(n)) * std::log(seq.b_n)));
  }
  return seq;
}

//! Blocks of length L_k = k^2 with thresholds t_k = ln^{-2}(2 + k), cut at the
//! minimal K with sum_{k <= K} L_k >= r^{1/5} b_r.
//!
//! Block k (0-based here) covers the integer frequencies
//! edges[k] + 1 .. edges[k + 1] in the finite case and the real interval
//! [edges[k], edges[k + 1]) in the infinite case.
class BlockScheme
{
public:
  BlockScheme() = default;

  BlockScheme(std::size_t r, SupportKind kind)
    : kind_(kind)
    , r_(r)
  {
    if (r < 5)
      throw SampleTooSmall("estimator needs at least 5 observations, got " +
                           std::to_string(r));
    const double rd = static_cast<double>(r);
    target_ = std::pow(rd, 0.2) * slow_growth(rd);

    edges_.push_back(0);
    std::size_t total = 0;
    for (std::size_t k = 1; static_cast<double>(total) < target_ || k == 1; ++k) {
      total += k * k;
      edges_.push_back(total);
      lengths_.push_back(k * k);
      const double lg = std::log(2.0 + static_cast<double>(k));
      thresholds_.push_back(1.0 / (lg * lg));
    }
  }

  SupportKind kind() const { return kind_; }
  std::size_t sample_size() const { return r_; }
  std::size_t block_count() const { return lengths_.size(); }

  //! r^{1/5} b_r, the quantity the cumulative length must reach.
  double cutoff_target() const { return target_; }

  std::size_t length(std::size_t k) const { return lengths_.at(k); }
  double threshold(std::size_t k) const { return thresholds_.at(k); }

  //! Lower edge of block k (exclusive index bound for finite support).
  std::size_t lower(std::size_t k) const { return edges_.at(k); }
  std::size_t upper(std::size_t k) const { return edges_.at(k + 1); }

  //! Total number of retained integer frequencies (finite) or the upper
  //! frequency limit (infinite).
  std::size_t total_length() const { return edges_.back(); }

  const std::vector<std::size_t>& edges() const { return edges_; }
  const std::vector<std::size_t>& lengths() const { return lengths_; }
  const std::vector<double>& thresholds() const { return thresholds_; }

private:
  SupportKind kind_ = SupportKind::finite;
  std::size_t r_ = 0;
  double target_ = 0.0;
  std::vector<std::size_t> edges_;
  std::vector<std::size_t> lengths_;
  std::vector<double> thresholds_;
};

inline BlockScheme build_block_scheme(std::size_t r, SupportKind kind)
{
  return BlockScheme(r, kind);
}

} // namespace epdens
