#pragma once

#include <stdexcept>
#include <string>

namespace epdens {

//! Base class of all errors raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

//! The sample is too small for the tuning sequences (min(n_1, n_2) <= 4)
//! or for the estimator (fewer than 5 observations).
class SampleTooSmall : public Error
{
public:
  using Error::Error;
};

class EmptySample : public Error
{
public:
  EmptySample()
    : Error("empty sample")
  {}
  using Error::Error;
};

class PredictorOutOfRange : public Error
{
public:
  using Error::Error;
};

//! Infinite-support residual range would overlap the nuisance subsamples.
class OverlapError : public Error
{
public:
  using Error::Error;
};

class DomainError : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class GridError : public Error
{
public:
  using Error::Error;
};

class ZeroIse : public Error
{
public:
  using Error::Error;
};

class DegenerateEstimate : public Error
{
public:
  using Error::Error;
};

} // namespace epdens
