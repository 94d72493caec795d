#pragma once

// Tail extraction and heavy-tail fits of transition values: log-log
// rank-value regression (primary), a continuous power-law maximum-likelihood
// estimate (secondary, for robustness comparison) and a log-normal fit.

#include <cstddef>
#include <span>
#include <vector>

#include "critrans/detector.hpp"

namespace critrans {

inline constexpr std::size_t kDefaultTailSize = 10000;
inline constexpr std::size_t kMinTailSize = 10;

enum class TailDirection { MostNegative, MostPositive };

const char* to_string(TailDirection d);

struct Tail {
  /// Absolute values, descending.
  std::vector<double> values;
  /// Index into the input records for each value.
  std::vector<std::size_t> record_index;
  /// Fewer than k qualifying records were available.
  bool truncated = false;
};

/// The k records with the most negative (or most positive) value of
/// `measure`. Only records on the requested side of zero qualify. Ties are
/// broken by input order, which is canonical for sweep() output.
Tail top_tail(std::span<const TransitionRecord> records, std::size_t k, TailDirection direction,
              Measure measure = Measure::U);

/// Same selection on raw values (e.g. avalanche sizes).
Tail top_tail(std::span<const double> values, std::size_t k, TailDirection direction);

struct TailFit {
  std::size_t k = 0;
  double exponent = 0.0;   // -slope of log2(value) on log2(rank)
  double intercept = 0.0;  // log2 units
  double r2 = 0.0;
  TailDirection direction = TailDirection::MostNegative;
};

/// Ordinary least squares of log2(value) on log2(rank), rank = 1..n in the
/// given order. Throws if fewer than 10 values or any value <= 0.
TailFit fit_powerlaw(std::span<const double> tail,
                     TailDirection direction = TailDirection::MostNegative);

/// Continuous power-law maximum-likelihood estimate with x_min fixed at the
/// smallest tail value: alpha = 1 + n / sum ln(x / x_min). Reported only as a
/// secondary estimator; the rank exponent implied by a density exponent alpha
/// is 1 / (alpha - 1).
struct PowerLawMle {
  double alpha = 0.0;
  double alpha_stderr = 0.0;
  double x_min = 0.0;
  std::size_t n = 0;
  double implied_rank_exponent = 0.0;
};

PowerLawMle fit_powerlaw_mle(std::span<const double> tail);

struct LognormalFit {
  double mu = 0.0;     // mean of ln(value)
  double sigma = 0.0;  // standard deviation of ln(value)
  double quantile_r2 = 0.0;
};

/// Throws if fewer than 10 values, any value <= 0, or sigma == 0
/// (degenerate).
LognormalFit fit_lognormal(std::span<const double> tail);

}  // namespace critrans
