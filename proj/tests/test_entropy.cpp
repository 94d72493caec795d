#include <cmath>
#include <random>
#include <vector>

#include "critrans/entropy.hpp"
#include "doctest.h"

using namespace critrans;

namespace {

double rel_gap(double a, double b, double scale) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), scale, 1e-300});
}

}  // namespace

TEST_CASE("shannon entropy") {
  CHECK(shannon_entropy(std::vector{0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(shannon_entropy(std::vector{1.0}) == 0.0);
  CHECK(shannon_entropy(std::vector{0.25, 0.75}) ==
        doctest::Approx(0.8112781244591328).epsilon(1e-14));
  // zero terms contribute nothing
  CHECK(shannon_entropy(std::vector{0.0, 0.5, 0.5}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(shannon_entropy(std::vector{0.5, 0.6}), Error);
  CHECK_THROWS_AS(shannon_entropy(std::vector{1.5, -0.5}), Error);
  CHECK_NOTHROW(shannon_entropy(std::vector{0.5, 0.5 + 5e-10}));
}

TEST_CASE("kl divergence") {
  const std::vector p{0.5, 0.5};
  const std::vector q{0.25, 0.75};
  CHECK(kl_divergence(q, q) == 0.0);
  CHECK(kl_divergence(q, p) == doctest::Approx(0.18872187554086717).epsilon(1e-14));
  // hand value: 0.25 log2 0.5 + 0.75 log2 1.5
  CHECK(kl_divergence(q, p) ==
        doctest::Approx(0.25 * std::log2(0.5) + 0.75 * std::log2(1.5)).epsilon(1e-15));
  CHECK(kl_divergence(p, q) != doctest::Approx(kl_divergence(q, p)));

  CHECK_THROWS_AS(kl_divergence(std::vector{0.5, 0.5}, std::vector{1.0, 0.0}), Error);
  CHECK_THROWS_AS(kl_divergence(std::vector{1.0}, std::vector{0.5, 0.5}), Error);
  CHECK_THROWS_AS(kl_divergence(std::vector{0.6, 0.6}, std::vector{0.5, 0.5}), Error);
  // posterior zero where prior is zero is fine
  CHECK(kl_divergence(std::vector{1.0, 0.0}, std::vector{1.0, 0.0}) == 0.0);
}

TEST_CASE("kl is non-negative on random pairs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = 2 + rng() % 40;
    std::vector<double> a(n), b(n);
    double sa = 0, sb = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = u(rng) + 1e-6;
      b[i] = u(rng) + 1e-6;
      sa += a[i];
      sb += b[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    REQUIRE(kl_divergence(a, b) >= -1e-12);
  }
}

TEST_CASE("cell indicators worked examples") {
  const auto a = cell_indicators(0.2, 0.3, 0.5);
  CHECK(a.u == doctest::Approx(-0.1169925001442312).epsilon(1e-13));
  CHECK(a.v == doctest::Approx(-0.07369655941662061).epsilon(1e-13));
  // three-term forms
  CHECK(a.u == doctest::Approx(a.i_qpp + a.i_ppp - a.i_qp).epsilon(1e-13));
  CHECK(a.v == doctest::Approx(a.i_ppr + a.i_ppq - a.i_pq).epsilon(1e-13));

  const auto b = cell_indicators(0.2, 0.5, 0.3);
  CHECK(b.u == doctest::Approx(0.2643856189774725).epsilon(1e-13));
  CHECK(b.v == doctest::Approx(0.22108967824986187).epsilon(1e-13));

  const auto c = cell_indicators(0.3, 0.3, 0.3);
  for (double x : {c.i_qp, c.i_qpp, c.i_ppp, c.i_pq, c.i_ppq, c.i_ppr, c.u, c.v, c.improve_fwd,
                   c.improve_bwd}) {
    CHECK(x == 0.0);
  }
}

TEST_CASE("cell indicators domain") {
  CHECK_THROWS_AS(cell_indicators(0.0, 0.3, 0.5), Error);
  CHECK_THROWS_AS(cell_indicators(0.2, 1.0, 0.5), Error);
  CHECK_THROWS_AS(cell_indicators(0.2, 0.3, -0.1), Error);
  CHECK_THROWS_AS(cell_indicators(0.2, 0.3, std::nan("")), Error);
  const auto one = cell_indicators_closed(1.0, 1.0, 1.0);
  CHECK(one.u == 0.0);
  CHECK(one.v == 0.0);
  CHECK_THROWS_AS(cell_indicators_closed(0.0, 0.5, 0.5), Error);
}

TEST_CASE("classification examples") {
  auto cls = [](double p, double pp, double q) {
    return classify(cell_indicators(p, pp, q), p, pp, q);
  };
  const auto inc = cls(0.2, 0.3, 0.5);
  CHECK(inc.critical_fwd);
  CHECK(inc.critical_bwd);
  CHECK(inc.improved_fwd);
  CHECK_FALSE(inc.improved_bwd);
  CHECK(inc.monotone == Monotone::Increasing);

  const auto dec = cls(0.5, 0.3, 0.2);
  CHECK(dec.critical_fwd);
  CHECK(dec.critical_bwd);
  CHECK_FALSE(dec.improved_fwd);
  CHECK(dec.improved_bwd);
  CHECK(dec.monotone == Monotone::Decreasing);

  const auto tie = cls(0.3, 0.3, 0.3);
  CHECK(tie.monotone == Monotone::Tied);
  CHECK(tie == Classification{false, false, false, false, Monotone::Tied});

  const auto non = cls(0.2, 0.5, 0.3);
  CHECK(non.monotone == Monotone::NonMonotone);
  CHECK_FALSE(non.critical_fwd);
  CHECK_FALSE(non.critical_bwd);
}

TEST_CASE("ties within eps are never critical") {
  const double p = 0.3;
  const double q = 0.3 + 1e-14;
  const double pp = 0.3 + 5e-15;
  const auto ind = cell_indicators(p, pp, q);
  const auto c = classify(ind, p, pp, q);
  CHECK(c.monotone == Monotone::Tied);
  CHECK_FALSE(c.critical_fwd);
  CHECK_FALSE(c.improved_fwd);
  CHECK_FALSE(c.improved_bwd);
  // a wider eps turns a clearly ordered triple into a tie
  CHECK(monotone_order(0.2, 0.3, 0.5, 0.15) == Monotone::Tied);
  // p and q close but p' far away is still a tie
  CHECK(monotone_order(0.3, 0.5, 0.3) == Monotone::Tied);
}

TEST_CASE("time reversal swaps u and v") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int t = 0; t < 1000; ++t) {
    const double p = u(rng), pp = u(rng), q = u(rng);
    const auto fwd = cell_indicators(p, pp, q);
    const auto rev = cell_indicators(q, pp, p);
    CHECK(rel_gap(fwd.u, rev.v, 0) < 1e-12);
    CHECK(rel_gap(fwd.v, rev.u, 0) < 1e-12);
  }
}

TEST_CASE("theil identity and closed forms on random triples") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  for (int t = 0; t < 10000; ++t) {
    const double p = u(rng), pp = u(rng), q = u(rng);
    const auto c = cell_indicators(p, pp, q);
    const double fwd_oracle = q * std::log(pp / p) / std::log(2.0);
    REQUIRE(rel_gap(c.i_qp - c.i_qpp, c.improve_fwd,
                    std::abs(c.i_qp) + std::abs(c.i_qpp)) < 1e-12);
    REQUIRE(rel_gap(c.improve_fwd, fwd_oracle, 0) < 1e-12);
    REQUIRE(rel_gap(c.u, c.i_qpp + c.i_ppp - c.i_qp,
                    std::abs(c.i_qpp) + std::abs(c.i_ppp) + std::abs(c.i_qp)) < 1e-12);
    REQUIRE(rel_gap(c.v, c.i_ppr + c.i_ppq - c.i_pq,
                    std::abs(c.i_ppr) + std::abs(c.i_ppq) + std::abs(c.i_pq)) < 1e-12);
  }
}

TEST_CASE("monotone names") {
  CHECK(std::string(to_string(Monotone::Increasing)) == "increasing");
  CHECK(std::string(to_string(Monotone::Tied)) == "tied");
}
