#pragma once

// Information-theoretic measures on relative frequencies, in bits.
//
// For a single cell observed as p (a priori), p' (revision) and q (a
// posteriori), the per-cell Kullback-Leibler contribution of prior x to
// posterior y is y * log2(y / x). Two path-dependency indicators follow:
//
//   U = I(q:p') + I(p':p) - I(q:p)     forward, along the arrow of time
//   V = I(p:p') + I(p':q) - I(p:q)     backward, from hindsight
//
// Expanding the logarithms gives U = (p' - q) log2(p'/p) and
// V = (p' - p) log2(p'/q), so both are negative exactly when p, p', q are
// strictly monotone. A negative value marks a critical transition.

#include <span>

#include "critrans/temporal.hpp"

namespace critrans {

inline constexpr double kDefaultTieEps = 1e-12;
inline constexpr double kBitsPerMillibit = 1e-3;

/// H = -sum p_i log2 p_i. Zero entries contribute nothing. Throws when the
/// values are negative or do not sum to 1 within 1e-9.
double shannon_entropy(std::span<const double> dist);

/// I(q:p) = sum q_i log2(q_i / p_i), the information of the message that
/// prior `p` turned into posterior `q`. Throws on length mismatch, on
/// unnormalized input, and when q_i > 0 meets p_i = 0.
double kl_divergence(std::span<const double> posterior, std::span<const double> prior);

/// Per-cell term y * log2(y / x); 0 when y == 0.
double kl_term(double posterior, double prior);

struct CellIndicators {
  double i_qp = 0.0;    // q log2(q/p)
  double i_qpp = 0.0;   // q log2(q/p')
  double i_ppp = 0.0;   // p' log2(p'/p)
  double i_pq = 0.0;    // p log2(p/q)
  double i_ppq = 0.0;   // p' log2(p'/q)
  double i_ppr = 0.0;   // p log2(p/p')
  double u = 0.0;
  double v = 0.0;
  double improve_fwd = 0.0;  // q log2(p'/p)
  double improve_bwd = 0.0;  // p log2(p'/q)
};

/// All per-cell terms. `u` and `v` use the factored closed forms, which do
/// not suffer the cancellation of the three-term sums; the i_* fields hold
/// the individual divergence terms for cross-checking. Throws unless every
/// input lies in (0, 1).
CellIndicators cell_indicators(double p, double p_prime, double q);
CellIndicators cell_indicators(const CellSeries& series);

/// As above but admits the degenerate value 1.0 (a single eligible link in
/// its normalization group). Inputs must lie in (0, 1].
CellIndicators cell_indicators_closed(double p, double p_prime, double q);

enum class Monotone { Increasing, Decreasing, NonMonotone, Tied };

const char* to_string(Monotone m);

struct Classification {
  bool critical_fwd = false;
  bool critical_bwd = false;
  bool improved_fwd = false;
  bool improved_bwd = false;
  Monotone monotone = Monotone::NonMonotone;

  bool operator==(const Classification&) const = default;
};

/// Ordering of (p, p', q) with ties within `tie_eps` treated as equal.
Monotone monotone_order(double p, double p_prime, double q, double tie_eps = kDefaultTieEps);

/// Sign rules with strict inequalities; ties are neither critical nor
/// improving.
Classification classify(const CellIndicators& ind, double p, double p_prime, double q,
                        double tie_eps = kDefaultTieEps);
Classification classify(const CellIndicators& ind, const CellSeries& series,
                        double tie_eps = kDefaultTieEps);

}  // namespace critrans
