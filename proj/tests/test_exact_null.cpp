#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "phidiv/asymptotic_null.hpp"
#include "phidiv/exact_null.hpp"
#include "phidiv/rng.hpp"

using namespace phidiv;

namespace {

const std::vector<double> kOrderGrid = {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};

// Independent oracle for P(a_i <= U_(i) <= b_i): the ordered-region integral
// n! * I_n(1), I_k(t) = integral of I_{k-1} over [a_k, min(b_k, t)].
// Integrands are piecewise polynomials with breakpoints among the band
// values, so splitting there and applying 5-point Gauss-Legendre per piece
// is exact up to roundoff.
class SimplexOracle {
 public:
  explicit SimplexOracle(const OrderStatBand& band) : band_(band) {
    for (const double v : band.lower) cuts_.push_back(v);
    for (const double v : band.upper) cuts_.push_back(v);
    std::sort(cuts_.begin(), cuts_.end());
  }

  double probability() const {
    double nf = 1.0;
    for (std::size_t k = 2; k <= band_.size(); ++k)
      nf *= static_cast<double>(k);
    return nf * level(band_.size(), 1.0);
  }

 private:
  double level(std::size_t k, double t) const {
    if (k == 0) return 1.0;
    const double lo = band_.lower[k - 1];
    const double hi = std::min(band_.upper[k - 1], t);
    if (!(hi > lo)) return 0.0;
    double acc = 0.0;
    double piece_lo = lo;
    for (const double c : cuts_) {
      if (c <= piece_lo) continue;
      const double piece_hi = std::min(c, hi);
      acc += gl5(k - 1, piece_lo, piece_hi);
      piece_lo = piece_hi;
      if (piece_lo >= hi) break;
    }
    if (piece_lo < hi) acc += gl5(k - 1, piece_lo, hi);
    return acc;
  }

  double gl5(std::size_t k, double a, double b) const {
    static const double kNodes[5] = {-0.906179845938664, -0.5384693101056831,
                                     0.0, 0.5384693101056831,
                                     0.906179845938664};
    static const double kWeights[5] = {
        0.23692688505618908, 0.47862867049936647, 0.5688888888888889,
        0.47862867049936647, 0.23692688505618908};
    if (!(b > a)) return 0.0;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i)
      acc += kWeights[i] * level(k, mid + half * kNodes[i]);
    return acc * half;
  }

  const OrderStatBand& band_;
  std::vector<double> cuts_;
};

double containment_mc(const OrderStatBand& band, std::size_t reps,
                      std::uint64_t seed) {
  const std::size_t n = band.size();
  std::vector<double> draw(n);
  std::size_t hits = 0;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    auto rng = rep_rng(seed, rep);
    for (auto& x : draw) x = uniform01_open(rng);
    std::sort(draw.begin(), draw.end());
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      ok = band.lower[i] <= draw[i] && draw[i] <= band.upper[i];
    hits += ok;
  }
  return static_cast<double>(hits) / static_cast<double>(reps);
}

}  // namespace

TEST_CASE("noe_probability hand anchors") {
  OrderStatBand trivial{{0.0, 0.0}, {1.0, 1.0}};
  CHECK(noe_probability(trivial) == doctest::Approx(1.0));

  OrderStatBand single{{0.1}, {0.9}};
  CHECK(noe_probability(single) == doctest::Approx(0.8).epsilon(1e-12));

  OrderStatBand pair{{0.0, 0.0}, {0.5, 1.0}};
  CHECK(noe_probability(pair) == doctest::Approx(0.75).epsilon(1e-12));

  // 2 * [int_{0.1}^{0.3} 0.5 du + int_{0.3}^{0.5} (0.8-u) du] = 0.36
  OrderStatBand hand{{0.1, 0.3}, {0.5, 0.8}};
  CHECK(noe_probability(hand) == doctest::Approx(0.36).epsilon(1e-12));

  OrderStatBand infeasible{{0.6, 0.7}, {0.5, 1.0}};
  CHECK(noe_probability(infeasible) == 0.0);
}

TEST_CASE("noe_probability vs simplex oracle for n <= 4") {
  auto rng = rep_rng(101, 0);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rng() % 4;
    OrderStatBand band;
    band.lower.resize(n);
    band.upper.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = (static_cast<double>(i) + uniform01_open(rng)) /
                       static_cast<double>(n);
      const double w = 0.1 + 0.8 * uniform01_open(rng);
      band.lower[i] = std::max(0.0, c - w);
      band.upper[i] = std::min(1.0, c + w);
    }
    std::sort(band.lower.begin(), band.lower.end());
    std::sort(band.upper.begin(), band.upper.end());
    const double got = noe_probability(band);
    const double want = SimplexOracle(band).probability();
    CHECK(std::fabs(got - want) <= 1e-8);
  }
}

TEST_CASE("noe_probability vs containment MC at n = 10") {
  const DivergenceOrder s(0.5);
  const auto band = band_constraints(10, s, 0.35);
  const double p = noe_probability(band);
  const std::size_t reps = 200000;
  const double phat = containment_mc(band, reps, 77);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
  CHECK(std::fabs(phat - p) <= 3.0 * se + 1e-12);
}

TEST_CASE("band_constraints anchors") {
  // n=1, s=1: a1 = e^-lambda, b1 = 1 - e^-lambda.
  for (const double lambda : {0.8, 1.5, 3.0}) {
    const auto band = band_constraints(1, DivergenceOrder(1.0), lambda);
    CHECK(band.lower[0] == doctest::Approx(std::exp(-lambda)).epsilon(1e-10));
    CHECK(band.upper[0] ==
          doctest::Approx(1.0 - std::exp(-lambda)).epsilon(1e-10));
  }
  // lambda = log 2 pinches the n=1 band to the single point 1/2.
  const auto pinch = band_constraints(1, DivergenceOrder(1.0), std::log(2.0));
  CHECK(pinch.lower[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(pinch.upper[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(cdf_exact(1, DivergenceOrder(1.0), std::log(2.0)) ==
        doctest::Approx(0.0).epsilon(1e-8));

  // Huge level: everything is admissible (up to root tolerance).
  const auto loose = band_constraints(5, DivergenceOrder(0.5), 1e6);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(loose.lower[i] <= 1e-9);
    CHECK(loose.upper[i] >= 1.0 - 1e-9);
  }
}

TEST_CASE("band monotone in lambda and symmetric") {
  for (const double s_value : kOrderGrid) {
    const DivergenceOrder s(s_value);
    const auto narrow = band_constraints(7, s, 0.2);
    const auto wide = band_constraints(7, s, 0.5);
    for (std::size_t i = 0; i < 7; ++i) {
      CHECK(wide.lower[i] <= narrow.lower[i] + 1e-12);
      CHECK(wide.upper[i] >= narrow.upper[i] - 1e-12);
      CHECK(std::fabs(narrow.lower[i] - (1.0 - narrow.upper[6 - i])) <=
            1e-10);
    }
  }
}

TEST_CASE("cdf_exact n=1 closed form and monotonicity") {
  const DivergenceOrder s(1.0);
  for (const double lambda : {0.75, 1.0, 2.0, 5.0}) {
    const double want =
        lambda >= std::log(2.0) ? 1.0 - 2.0 * std::exp(-lambda) : 0.0;
    CHECK(cdf_exact(1, s, lambda) == doctest::Approx(want).epsilon(1e-9));
  }
  CHECK(cdf_exact(1, s, 1e-6) == 0.0);
  CHECK(cdf_exact(25, DivergenceOrder(0.5), 50.0) ==
        doctest::Approx(1.0).epsilon(1e-9));
  double prev = -1.0;
  for (double lambda = 0.05; lambda < 1.0; lambda += 0.05) {
    const double c = cdf_exact(12, DivergenceOrder(1.5), lambda);
    CHECK(c >= prev - 1e-12);
    prev = c;
  }
  CHECK_THROWS_AS(cdf_exact(0, s, 1.0), std::out_of_range);
  CHECK_THROWS_AS(cdf_exact(3001, s, 1.0), std::out_of_range);
}

TEST_CASE("quantile_exact closed form and monotonicity") {
  const DivergenceOrder s(1.0);
  for (const double alpha : {0.01, 0.05, 0.2, 0.5}) {
    CHECK(quantile_exact(1, s, alpha) ==
          doctest::Approx(std::log(2.0 / alpha)).epsilon(1e-9));
  }
  double prev = 1e300;
  for (const double alpha : {0.01, 0.05, 0.1, 0.25, 0.5, 0.9}) {
    const double q = quantile_exact(9, DivergenceOrder(2.0), alpha);
    CHECK(q < prev);
    prev = q;
    CHECK(cdf_exact(9, DivergenceOrder(2.0), q) >=
          doctest::Approx(1.0 - alpha).epsilon(1e-7));
  }
}

TEST_CASE("exact quantile calibrates a null Monte Carlo at n = 20") {
  const DivergenceOrder s(2.0);
  const double q = quantile_exact(20, s, 0.05);
  const std::size_t reps = 100000;
  std::size_t rejections = 0;
  std::vector<double> draw(20);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    auto rng = rep_rng(5150, rep);
    for (auto& x : draw) x = uniform01_open(rng);
    std::sort(draw.begin(), draw.end());
    double stat = 0.0;
    for (std::size_t i = 0; i <= 20; ++i) {
      const double u = static_cast<double>(i) / 20.0;
      if (i >= 1) stat = std::max(stat, kdiv_value(s, u, draw[i - 1]));
      if (i < 20) stat = std::max(stat, kdiv_value(s, u, draw[i]));
    }
    rejections += stat > q;
  }
  const double rate =
      static_cast<double>(rejections) / static_cast<double>(reps);
  CHECK(std::fabs(rate - 0.05) <= 0.002);
}

TEST_CASE("deep band at n = 3000 stays in (0,1)") {
  for (const double s_value : {0.5, 1.0, 2.0}) {
    const DivergenceOrder s(s_value);
    const double lambda =
        quantile_asymptotic(3000, s, 0.5);  // near the median
    const double p = cdf_exact(3000, s, lambda);
    CHECK(std::isfinite(p));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("quantile cache round trip") {
  QuantileCache cache;
  cache.insert(20, 0.5, 0.05, 0.123456789012345678);
  cache.insert(100, -1.0, 0.1, 3.9);
  const std::string path = "qcache_test.csv";
  cache.save(path);
  const auto loaded = QuantileCache::load(path);
  REQUIRE(loaded.size() == 2);
  CHECK(*loaded.lookup(20, 0.5, 0.05) == 0.123456789012345678);
  CHECK(*loaded.lookup(100, -1.0, 0.1) == 3.9);
  CHECK_FALSE(loaded.lookup(21, 0.5, 0.05).has_value());
  std::remove(path.c_str());

  QuantileCache computing;
  const double q1 = computing.quantile(8, DivergenceOrder(1.0), 0.1);
  const double q2 = computing.quantile(8, DivergenceOrder(1.0), 0.1);
  CHECK(q1 == q2);
  CHECK(computing.size() == 1);
}
