#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "phidiv/divergence.hpp"

namespace phidiv {

/// Per-index bounds a_i <= U_(i) <= b_i on uniform order statistics.
/// Isotone after construction by band_constraints; an entry pair with
/// a_i > b_i encodes an infeasible band (containment probability 0).
struct OrderStatBand {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const { return lower.size(); }
};

/// Translates {S_n(s) <= lambda} into order-statistic bounds. From the
/// endpoint reduction of the supremum, a_i comes from inverting K_s(i/n, .)
/// and b_i from inverting K_s((i-1)/n, .). For s < 1 the constraints from
/// x < X_(1) and x >= X_(n) are dropped (restricted supremum), leaving
/// b_1 = 1 and a_n = 0; the missing sides are supplied by the ordering of
/// the order statistics themselves.
OrderStatBand band_constraints(std::size_t n, DivergenceOrder s,
                               double lambda);

/// P(a_i <= U_(i) <= b_i for all i) for n i.i.d. Uniform(0,1) order
/// statistics, by dynamic programming over the merged breakpoints: the
/// distribution of the count of observations at or below each breakpoint is
/// advanced with binomial-increment convolutions and truncated by the
/// "at most i-1 below a_i" / "at least i below b_i" rules. Mantissas carry
/// an explicit shared power-of-two exponent so large n cannot underflow.
double noe_probability(const OrderStatBand& band);

/// Exact null CDF P(S_n(s) <= lambda); nondecreasing in lambda.
double cdf_exact(std::size_t n, DivergenceOrder s, double lambda,
                 std::size_t n_max = 3000);

/// Smallest lambda with cdf_exact >= 1 - alpha, to relative tolerance 1e-9.
double quantile_exact(std::size_t n, DivergenceOrder s, double alpha,
                      std::size_t n_max = 3000);

/// Quantile store with a plain-CSV disk format (`n,s,alpha,q`, 17 significant
/// digits, exact decimal round-trip). Not synchronized; share per thread or
/// fill before fan-out.
class QuantileCache {
 public:
  QuantileCache() = default;

  static QuantileCache load(const std::string& path);
  void save(const std::string& path) const;

  std::optional<double> lookup(std::size_t n, double s, double alpha) const;
  void insert(std::size_t n, double s, double alpha, double q);

  /// Cached quantile_exact.
  double quantile(std::size_t n, DivergenceOrder s, double alpha,
                  std::size_t n_max = 3000);

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::tuple<std::size_t, double, double>, double> entries_;
};

}  // namespace phidiv
