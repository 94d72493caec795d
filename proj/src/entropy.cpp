#include "critrans/entropy.hpp"

#include <cmath>
#include <string>

namespace critrans {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_distribution(std::span<const double> d, const char* what) {
  double sum = 0.0;
  for (double x : d) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(std::string(what) + ": probabilities must be finite and non-negative");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(std::string(what) + ": probabilities sum to " + format_double(sum) +
                ", not 1");
  }
}

}  // namespace

double shannon_entropy(std::span<const double> dist) {
  check_distribution(dist, "shannon_entropy");
  double h = 0.0;
  for (double x : dist) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h;
}

double kl_term(double posterior, double prior) {
  if (posterior == 0.0) return 0.0;
  return posterior * std::log2(posterior / prior);
}

double kl_divergence(std::span<const double> posterior, std::span<const double> prior) {
  if (posterior.size() != prior.size()) {
    throw Error("kl_divergence: distributions differ in length");
  }
  check_distribution(posterior, "kl_divergence posterior");
  check_distribution(prior, "kl_divergence prior");
  double sum = 0.0;
  for (std::size_t i = 0; i < posterior.size(); ++i) {
    if (posterior[i] > 0.0 && prior[i] == 0.0) {
      throw Error("kl_divergence: undefined, posterior mass at index " + std::to_string(i) +
                  " where the prior is zero");
    }
    sum += kl_term(posterior[i], prior[i]);
  }
  return sum;
}

CellIndicators cell_indicators_closed(double p, double p_prime, double q) {
  auto valid = [](double x) { return x > 0.0 && x <= 1.0; };
  if (!valid(p) || !valid(p_prime) || !valid(q)) {
    throw Error("cell_indicators: relative frequencies must lie in (0, 1]");
  }
  CellIndicators r;
  r.i_qp = kl_term(q, p);
  r.i_qpp = kl_term(q, p_prime);
  r.i_ppp = kl_term(p_prime, p);
  r.i_pq = kl_term(p, q);
  r.i_ppq = kl_term(p_prime, q);
  r.i_ppr = kl_term(p, p_prime);
  const double log_rev_prior = std::log2(p_prime / p);
  const double log_rev_post = std::log2(p_prime / q);
  r.u = (p_prime - q) * log_rev_prior;
  r.v = (p_prime - p) * log_rev_post;
  r.improve_fwd = q * log_rev_prior;
  r.improve_bwd = p * log_rev_post;
  return r;
}

CellIndicators cell_indicators(double p, double p_prime, double q) {
  auto open = [](double x) { return x > 0.0 && x < 1.0; };
  if (!open(p) || !open(p_prime) || !open(q)) {
    throw Error("cell_indicators: relative frequencies must lie in (0, 1)");
  }
  return cell_indicators_closed(p, p_prime, q);
}

CellIndicators cell_indicators(const CellSeries& series) {
  return cell_indicators(series.p, series.p_prime, series.q);
}

const char* to_string(Monotone m) {
  switch (m) {
    case Monotone::Increasing: return "increasing";
    case Monotone::Decreasing: return "decreasing";
    case Monotone::NonMonotone: return "non-monotone";
    case Monotone::Tied: return "tied";
  }
  return "?";
}

Monotone monotone_order(double p, double p_prime, double q, double tie_eps) {
  if (p + tie_eps < p_prime && p_prime + tie_eps < q) return Monotone::Increasing;
  if (p_prime + tie_eps < p && q + tie_eps < p_prime) return Monotone::Decreasing;
  if (std::abs(p - p_prime) <= tie_eps || std::abs(p_prime - q) <= tie_eps ||
      std::abs(p - q) <= tie_eps) {
    return Monotone::Tied;
  }
  return Monotone::NonMonotone;
}

Classification classify(const CellIndicators& ind, double p, double p_prime, double q,
                        double tie_eps) {
  Classification c;
  c.monotone = monotone_order(p, p_prime, q, tie_eps);
  const bool ordered =
      c.monotone == Monotone::Increasing || c.monotone == Monotone::Decreasing;
  c.critical_fwd = ordered && ind.u < 0.0;
  c.critical_bwd = ordered && ind.v < 0.0;
  c.improved_fwd = ind.improve_fwd > 0.0 && p_prime - p > tie_eps;
  c.improved_bwd = ind.improve_bwd > 0.0 && p_prime - q > tie_eps;
  return c;
}

Classification classify(const CellIndicators& ind, const CellSeries& series, double tie_eps) {
  return classify(ind, series.p, series.p_prime, series.q, tie_eps);
}

}  // namespace critrans
