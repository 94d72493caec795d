#include "critrans/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

namespace critrans {

namespace {

void check_tail(std::span<const double> tail, const char* what) {
  if (tail.size() < kMinTailSize) {
    throw Error(std::string(what) + ": need at least " + std::to_string(kMinTailSize) +
                " values, got " + std::to_string(tail.size()));
  }
  for (double v : tail) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(std::string(what) + ": values must be positive and finite");
    }
  }
}

struct Regression {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Two-pass OLS of y on x.
Regression ols(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  Regression r;
  // A constant response is fitted exactly by a flat line; test it directly
  // because the mean of equal values can be off by an ulp.
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
    r.intercept = y.front();
    r.r2 = 1.0;
    return r;
  }
  r.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  r.intercept = my - r.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.intercept + r.slope * x[i]);
    ss_res += e * e;
  }
  r.r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return r;
}

template <typename ValueAt>
Tail select_tail(std::size_t n, std::size_t k, TailDirection direction, ValueAt&& value_at) {
  if (k == 0) throw Error("top_tail: k must be at least 1");
  std::vector<std::size_t> idx;
  idx.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = value_at(i);
    if (direction == TailDirection::MostNegative ? v < 0.0 : v > 0.0) idx.push_back(i);
  }
  Tail t;
  t.truncated = idx.size() < k;
  const std::size_t take = std::min(k, idx.size());
  auto before = [&](std::size_t a, std::size_t b) {
    const double va = std::abs(value_at(a));
    const double vb = std::abs(value_at(b));
    if (va != vb) return va > vb;
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(),
                    before);
  idx.resize(take);
  t.values.reserve(take);
  for (auto i : idx) t.values.push_back(std::abs(value_at(i)));
  t.record_index = std::move(idx);
  return t;
}

}  // namespace

const char* to_string(TailDirection d) {
  return d == TailDirection::MostNegative ? "most_negative" : "most_positive";
}

Tail top_tail(std::span<const TransitionRecord> records, std::size_t k, TailDirection direction,
              Measure measure) {
  return select_tail(records.size(), k, direction,
                     [&](std::size_t i) { return measure_of(records[i], measure); });
}

Tail top_tail(std::span<const double> values, std::size_t k, TailDirection direction) {
  return select_tail(values.size(), k, direction, [&](std::size_t i) { return values[i]; });
}

TailFit fit_powerlaw(std::span<const double> tail, TailDirection direction) {
  check_tail(tail, "fit_powerlaw");
  std::vector<double> x(tail.size());
  std::vector<double> y(tail.size());
  for (std::size_t i = 0; i < tail.size(); ++i) {
    x[i] = std::log2(static_cast<double>(i + 1));
    y[i] = std::log2(tail[i]);
  }
  const auto reg = ols(x, y);
  TailFit f;
  f.k = tail.size();
  f.exponent = -reg.slope;
  f.intercept = reg.intercept;
  f.r2 = reg.r2;
  f.direction = direction;
  return f;
}

PowerLawMle fit_powerlaw_mle(std::span<const double> tail) {
  check_tail(tail, "fit_powerlaw_mle");
  const double x_min = *std::min_element(tail.begin(), tail.end());
  double log_sum = 0.0;
  for (double v : tail) log_sum += std::log(v / x_min);
  if (!(log_sum > 0.0)) throw Error("fit_powerlaw_mle: degenerate tail (all values equal)");
  PowerLawMle m;
  m.n = tail.size();
  m.x_min = x_min;
  m.alpha = 1.0 + static_cast<double>(m.n) / log_sum;
  m.alpha_stderr = (m.alpha - 1.0) / std::sqrt(static_cast<double>(m.n));
  m.implied_rank_exponent = 1.0 / (m.alpha - 1.0);
  return m;
}

LognormalFit fit_lognormal(std::span<const double> tail) {
  check_tail(tail, "fit_lognormal");
  // Test equality directly; the mean of equal logs can be off by an ulp.
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  if (*lo == *hi) throw Error("fit_lognormal: degenerate tail (zero variance)");
  std::vector<double> logs(tail.size());
  std::transform(tail.begin(), tail.end(), logs.begin(), [](double v) { return std::log(v); });
  const double n = static_cast<double>(logs.size());
  const double mu = std::accumulate(logs.begin(), logs.end(), 0.0) / n;
  double ss = 0.0;
  for (double l : logs) ss += (l - mu) * (l - mu);
  const double sigma = std::sqrt(ss / n);
  if (!(sigma > 0.0)) throw Error("fit_lognormal: degenerate tail (zero variance)");

  std::sort(logs.begin(), logs.end());
  const boost::math::normal_distribution<double> std_normal;
  std::vector<double> z(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    z[i] = boost::math::quantile(std_normal, (static_cast<double>(i) + 0.5) / n);
  }
  LognormalFit f;
  f.mu = mu;
  f.sigma = sigma;
  f.quantile_r2 = ols(z, logs).r2;
  return f;
}

}  // namespace critrans
