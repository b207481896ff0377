#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "phidiv/rng.hpp"
#include "phidiv/statistics.hpp"

using namespace phidiv;

namespace {

const std::vector<double> kOrderGrid = {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};

Sample random_sample(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform01_open(rng);
  return Sample(std::move(v));
}

// Relative agreement that also accepts a shared +infinity (the s <= 0
// single-point conventions are infinite by design).
bool agree(double got, double want, double rel) {
  if (std::isinf(got) || std::isinf(want)) return got == want;
  return std::fabs(got - want) <= rel * (1.0 + std::fabs(want));
}

}  // namespace

TEST_CASE("sample validation") {
  CHECK_THROWS_AS(Sample({0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Sample({1.0}), std::invalid_argument);
  const Sample tied({0.4, 0.4, 0.7});
  CHECK(tied.has_ties());
  CHECK(tied.order_stat(1) == 0.4);
  CHECK_FALSE(Sample({0.1, 0.2}).has_ties());
}

TEST_CASE("sn single-point anchors") {
  const Sample one({0.5});
  CHECK(sn(DivergenceOrder(2.0), one).value == doctest::Approx(0.5).epsilon(1e-12));
  // n = 1 with s < 1: documented single-point convention K_s(1, X_(1)).
  CHECK(sn(DivergenceOrder(0.5), one).value ==
        doctest::Approx(kdiv_value(DivergenceOrder(0.5), 1.0, 0.5)).epsilon(1e-13));
  CHECK_THROWS_AS(sn(DivergenceOrder(1.0), Sample(std::vector<double>{})),
                  std::invalid_argument);
}

TEST_CASE("sn near-uniform plotting positions stay small and match oracle") {
  std::vector<double> v;
  const std::size_t n = 12;
  for (std::size_t i = 1; i <= n; ++i)
    v.push_back(static_cast<double>(i) / static_cast<double>(n + 1));
  const Sample sample(v);
  for (const double s : kOrderGrid) {
    const DivergenceOrder order(s);
    const double got = sn(order, sample).value;
    CHECK(got < 0.2);
    CHECK(got == doctest::Approx(oracle::sup_oracle(order, sample))
                     .epsilon(1e-10));
  }
}

TEST_CASE("sn reflection invariance") {
  auto rng = rep_rng(7, 0);
  for (int rep = 0; rep < 5; ++rep) {
    const Sample sample = random_sample(rng, 9);
    std::vector<double> reflected;
    for (const double x : sample.values()) reflected.push_back(1.0 - x);
    const Sample mirror(reflected);
    for (const double s : kOrderGrid) {
      const DivergenceOrder order(s);
      CHECK(sn(order, sample).value ==
            doctest::Approx(sn(order, mirror).value).epsilon(1e-12));
    }
  }
}

TEST_CASE("sn_plus anchors") {
  const Sample sample({0.1, 0.6});
  const double expected = 0.5108256237659907;  // K_1(1/2, 0.1)
  CHECK(sn_plus(DivergenceOrder(1.0), sample).value ==
        doctest::Approx(expected).epsilon(1e-12));
  // All mass above the cap: the one-sided statistic vanishes.
  const Sample high({0.6, 0.7, 0.9});
  for (const double s : kOrderGrid)
    CHECK(sn_plus(DivergenceOrder(s), high).value == 0.0);
}

TEST_CASE("sn_plus below sn for s >= 1") {
  auto rng = rep_rng(11, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Sample sample = random_sample(rng, 13);
    for (const double s : {1.0, 1.5, 2.0}) {
      const DivergenceOrder order(s);
      CHECK(sn_plus(order, sample).value <= sn(order, sample).value + 1e-13);
    }
  }
}

TEST_CASE("unrestricted variants") {
  const Sample one({0.5});
  const double tail = 1.1715728752538097;  // 4(1 - sqrt(1/2))
  CHECK(sn_unrestricted(DivergenceOrder(0.5), one).value ==
        doctest::Approx(tail).epsilon(1e-12));
  CHECK_THROWS_AS(sn_unrestricted(DivergenceOrder(1.0), one),
                  std::domain_error);
  CHECK_THROWS_AS(sn_ur_plus(DivergenceOrder(0.0), one), std::domain_error);

  auto rng = rep_rng(13, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Sample sample = random_sample(rng, 11);
    for (const double s : {0.25, 0.5, 0.75}) {
      const DivergenceOrder order(s);
      const double ur = sn_unrestricted(order, sample).value;
      const double urp = sn_ur_plus(order, sample).value;
      const double urm = sn_ur_minus(order, sample).value;
      CHECK(urp <= ur + 1e-13);
      CHECK(urm <= ur + 1e-13);
      // One-sided reduction over the order statistics from the plus side.
      double reduction = 0.0;
      const double nn = static_cast<double>(sample.size());
      for (std::size_t i = 1; i <= sample.size(); ++i)
        reduction = std::max(
            reduction, kdiv_plus_value(order, static_cast<double>(i) / nn,
                                       sample.order_stat(i)));
      CHECK(urp == doctest::Approx(reduction).epsilon(1e-12));
    }
  }
}

TEST_CASE("hc_star anchors and errors") {
  const Sample sample({0.1, 0.6});
  CHECK(hc_star(sample, 1.0).value ==
        doctest::Approx(1.8856180831641267).epsilon(1e-12));
  // floor(alpha0 n) = 1 leaves the empty range [X_(1), X_(1)).
  CHECK_THROWS_AS(hc_star(sample, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(hc_star(sample, 0.2), std::invalid_argument);
  // Empirical d.f. below the diagonal: nonpositive supremum.
  const Sample high({0.9, 0.97});
  CHECK(hc_star(high, 1.0).value <= 0.0);
}

TEST_CASE("hc relation to the order-2 statistic") {
  auto rng = rep_rng(17, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Sample sample = random_sample(rng, 10);
    const std::size_t n = sample.size();
    const double nn = static_cast<double>(n);
    // Two-sided full-range HC built directly on the endpoint set.
    double hc2 = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double u = static_cast<double>(i) / nn;
      const auto g = [&](double x) {
        return std::sqrt(nn) * std::fabs(u - x) / std::sqrt(x * (1.0 - x));
      };
      if (i >= 1) hc2 = std::max(hc2, g(sample.order_stat(i)));
      if (i < n) hc2 = std::max(hc2, g(sample.order_stat(i + 1)));
    }
    const double sn2 = sn(DivergenceOrder(2.0), sample).value;
    CHECK(0.5 * hc2 * hc2 ==
          doctest::Approx(nn * sn2).epsilon(1e-11));
  }
}

TEST_CASE("tn anchors") {
  const Sample one({0.5});
  CHECK(tn(DivergenceOrder(2.0), one).value ==
        doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-12));
  CHECK_THROWS_AS(tn(DivergenceOrder(0.0), one), std::invalid_argument);
  auto rng = rep_rng(19, 0);
  const Sample sample = random_sample(rng, 8);
  std::vector<double> reflected;
  for (const double x : sample.values()) reflected.push_back(1.0 - x);
  const Sample mirror(reflected);
  for (const double s : kOrderGrid) {
    const DivergenceOrder order(s);
    CHECK(tn(order, sample).value > 0.0);
    CHECK(tn(order, sample).value ==
          doctest::Approx(tn(order, mirror).value).epsilon(1e-11));
  }
}

TEST_CASE("oracle equivalence on random samples") {
  auto rng = rep_rng(23, 0);
  for (int rep = 0; rep < 12; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng() % 20);
    const Sample sample = random_sample(rng, n);
    for (const double s : kOrderGrid) {
      const DivergenceOrder order(s);
      CHECK(agree(sn(order, sample).value, oracle::sup_oracle(order, sample),
                  1e-8));
      CHECK(agree(sn_plus(order, sample).value,
                  oracle::sup_plus_oracle(order, sample), 1e-8));
      if (n >= 2 || s > 0.0) {
        CHECK(agree(tn(order, sample).value, oracle::tn_oracle(order, sample),
                    1e-8));
      }
      if (s > 0.0 && s < 1.0) {
        const double ur_want = oracle::segment_scan_sup(
            sample.values(), 1e-9, 1.0 - 1e-9,
            [&](double u, double x) { return kdiv_value(order, u, x); },
            1e-5);
        CHECK(agree(sn_unrestricted(order, sample).value, ur_want, 1e-8));
      }
    }
    if (n >= 2) {
      CHECK(agree(hc_star(sample, 1.0).value,
                  oracle::hc_star_oracle(sample, 1.0), 1e-8));
    }
  }
}

TEST_CASE("interior probe points never beat the endpoint reduction") {
  auto rng = rep_rng(29, 0);
  const Sample sample = random_sample(rng, 15);
  const auto& v = sample.values();
  for (const double s : kOrderGrid) {
    const DivergenceOrder order(s);
    const double got = sn(order, sample).value;
    const bool full = s >= 1.0;
    const double lo = full ? 1e-6 : v.front();
    const double hi = full ? 1.0 - 1e-6 : v.back();
    for (int probe = 0; probe < 1000; ++probe) {
      const double x = lo + (hi - lo) * uniform01_open(rng);
      if (x >= hi) continue;
      const double k = kdiv_value(order, oracle::ecdf(v, x), x);
      CHECK(k <= got + 1e-10);
    }
  }
}

TEST_CASE("shifting mass toward zero does not decrease sn_plus") {
  auto rng = rep_rng(31, 0);
  for (int rep = 0; rep < 8; ++rep) {
    const Sample sample = random_sample(rng, 12);
    std::vector<double> shifted;
    for (const double x : sample.values()) shifted.push_back(0.8 * x);
    const Sample closer(shifted);
    for (const double s : kOrderGrid) {
      const DivergenceOrder order(s);
      CHECK(sn_plus(order, closer).value >=
            sn_plus(order, sample).value - 1e-12);
    }
  }
}

TEST_CASE("order-2 and order--1 closed-form identities") {
  auto rng = rep_rng(37, 0);
  const Sample sample = random_sample(rng, 14);
  const std::size_t n = sample.size();
  const double nn = static_cast<double>(n);
  const auto k2 = [](double u, double v) {
    return 0.5 * (u - v) * (u - v) / (v * (1.0 - v));
  };
  double direct2 = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double u = static_cast<double>(i) / nn;
    if (i >= 1) direct2 = std::max(direct2, k2(u, sample.order_stat(i)));
    if (i < n) direct2 = std::max(direct2, k2(u, sample.order_stat(i + 1)));
  }
  CHECK(sn(DivergenceOrder(2.0), sample).value ==
        doctest::Approx(direct2).epsilon(1e-12));
  // K_{-1}(u, v) = K_2(v, u), restricted range.
  double direct_m1 = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double u = static_cast<double>(i) / nn;
    direct_m1 = std::max(direct_m1, k2(sample.order_stat(i), u));
    direct_m1 = std::max(direct_m1, k2(sample.order_stat(i + 1), u));
  }
  CHECK(sn(DivergenceOrder(-1.0), sample).value ==
        doctest::Approx(direct_m1).epsilon(1e-12));
}

TEST_CASE("ties are tolerated") {
  const Sample tied({0.2, 0.2, 0.5, 0.5, 0.5, 0.8});
  for (const double s : kOrderGrid) {
    const DivergenceOrder order(s);
    CHECK(std::isfinite(sn(order, tied).value));
    CHECK(std::isfinite(tn(order, tied).value));
    CHECK(sn(order, tied).value >= 0.0);
  }
}
