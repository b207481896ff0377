#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "phidiv/divergence.hpp"
#include "phidiv/statistics.hpp"

namespace phidiv {

/// Centering constants of the double-exponential null limit. All logs are
/// natural iterated logs: log2 n = log log n, log3 n = log log log n.
struct CenteringConstants {
  double r_n = 0.0;
  double b_n = 0.0;
  double c_n = 0.0;
  double n = 0.0;
};

/// Real-valued n, n > e required (log log n > 0). Integer callers should
/// prefer the size_t overload, which enforces the documented n >= 16 floor.
CenteringConstants centering(double n);
CenteringConstants centering(std::size_t n);

/// exp(-4 exp(-x)) and its inverse.
double ev4_cdf(double x);
double ev4_quantile(double p);

/// P-value of the sup statistic from the double-exponential limit of
/// n S_n(s) - r_n; valid for s in [-1, 2] only.
double pvalue_asymptotic(std::size_t n, DivergenceOrder s, double statistic);
double pvalue_asymptotic(DivergenceOrder s, const StatValue& stat);

/// Asymptotic upper-alpha critical value of S_n(s): (r_n + ev4_quantile(1-alpha))/n.
double quantile_asymptotic(std::size_t n, DivergenceOrder s, double alpha);

/// One draw from the Anderson-Darling-type limit A^2 = sum Z_j^2/(j(j+1)),
/// truncated at `truncation` terms with the exact tail mean 1/(J+1) added
/// back as compensation.
double ad_limit_draw(std::mt19937_64& rng, std::size_t truncation = 10000);

struct MonteCarloPValue {
  double p = 0.0;
  double se = 0.0;
};

/// Cache of A^2/2 draws for integral-statistic p-values; reproducible from
/// (seed, truncation) and persistable (CSV of draws with a header line).
class AdLimitCache {
 public:
  AdLimitCache() = default;

  static AdLimitCache build(std::size_t count, std::uint64_t seed,
                            std::size_t truncation = 10000,
                            std::size_t threads = 0);
  static AdLimitCache load(const std::string& path);
  void save(const std::string& path) const;

  /// P(A^2/2 > x) with its Monte Carlo standard error.
  MonteCarloPValue upper_tail(double x) const;

  double mean() const;
  std::size_t size() const { return draws_.size(); }
  std::uint64_t seed() const { return seed_; }
  std::size_t truncation() const { return truncation_; }
  bool empty() const { return draws_.empty(); }

 private:
  std::vector<double> draws_;  // sorted values of A^2/2
  std::uint64_t seed_ = 0;
  std::size_t truncation_ = 0;
};

/// P-value of n T_n(s) against the cached A^2/2 law; s <= 2 required.
MonteCarloPValue tn_pvalue_asymptotic(std::size_t n, DivergenceOrder s,
                                      double tn_value,
                                      const AdLimitCache& cache);

}  // namespace phidiv
