#include "phidiv/asymptotic_null.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "phidiv/parallel.hpp"
#include "phidiv/rng.hpp"

namespace phidiv {

namespace {
constexpr std::uint64_t kAdStream = 0x41443243u;  // distinct seed stream tag
const double kHalfLog4Pi = 0.5 * std::log(4.0 * std::numbers::pi);
}  // namespace

CenteringConstants centering(double n) {
  const double l1 = std::log(n);
  if (!(l1 > 1.0))
    throw std::domain_error("centering: need n > e so that log log n > 0");
  const double l2 = std::log(l1);
  const double l3 = std::log(l2);
  CenteringConstants c;
  c.n = n;
  c.r_n = l2 + 0.5 * l3 - kHalfLog4Pi;
  c.b_n = std::sqrt(2.0 * l2);
  c.c_n = 2.0 * l2 + 0.5 * l3 - kHalfLog4Pi;
  return c;
}

CenteringConstants centering(std::size_t n) {
  if (n < 16)
    throw std::domain_error(
        "centering: n < 16; use exact methods at this sample size");
  return centering(static_cast<double>(n));
}

double ev4_cdf(double x) { return std::exp(-4.0 * std::exp(-x)); }

double ev4_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("ev4_quantile: p outside (0,1)");
  return -std::log(-std::log(p) / 4.0);
}

namespace {

void check_sup_limit_range(DivergenceOrder s) {
  if (!(s.s() >= -1.0 && s.s() <= 2.0))
    throw std::domain_error(
        "asymptotic sup-statistic theory covers s in [-1,2] only");
}

}  // namespace

double pvalue_asymptotic(std::size_t n, DivergenceOrder s, double statistic) {
  check_sup_limit_range(s);
  const auto c = centering(n);
  return 1.0 - ev4_cdf(static_cast<double>(n) * statistic - c.r_n);
}

double pvalue_asymptotic(DivergenceOrder s, const StatValue& stat) {
  return pvalue_asymptotic(stat.n, s, stat.value);
}

double quantile_asymptotic(std::size_t n, DivergenceOrder s, double alpha) {
  check_sup_limit_range(s);
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("quantile_asymptotic: alpha outside (0,1)");
  const auto c = centering(n);
  return (c.r_n + ev4_quantile(1.0 - alpha)) / static_cast<double>(n);
}

double ad_limit_draw(std::mt19937_64& rng, std::size_t truncation) {
  if (truncation < 1) throw std::domain_error("ad_limit_draw: truncation < 1");
  NormalSampler normal(rng);
  double acc = 0.0;
  for (std::size_t j = 1; j <= truncation; ++j) {
    const double z = normal();
    acc += z * z / (static_cast<double>(j) * static_cast<double>(j + 1));
  }
  // Exact mean of the dropped tail: sum_{j>J} 1/(j(j+1)) = 1/(J+1).
  return acc + 1.0 / static_cast<double>(truncation + 1);
}

AdLimitCache AdLimitCache::build(std::size_t count, std::uint64_t seed,
                                 std::size_t truncation, std::size_t threads) {
  AdLimitCache cache;
  cache.seed_ = seed;
  cache.truncation_ = truncation;
  cache.draws_.resize(count);
  parallel_chunks(count, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto rng = rep_rng(seed, i, kAdStream);
      cache.draws_[i] = 0.5 * ad_limit_draw(rng, truncation);
    }
  });
  std::sort(cache.draws_.begin(), cache.draws_.end());
  return cache;
}

AdLimitCache AdLimitCache::load(const std::string& path) {
  AdLimitCache cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  if (!std::getline(in, line)) return cache;
  {
    std::istringstream header(line);
    std::string tag;
    header >> tag >> cache.seed_ >> cache.truncation_;
    if (tag != "#ad2-half-draws") return AdLimitCache{};
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    cache.draws_.push_back(std::strtod(line.c_str(), nullptr));
  }
  std::sort(cache.draws_.begin(), cache.draws_.end());
  return cache;
}

void AdLimitCache::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("AdLimitCache: cannot write " + path);
  out << "#ad2-half-draws " << seed_ << " " << truncation_ << "\n";
  char buf[64];
  for (const double d : draws_) {
    std::snprintf(buf, sizeof buf, "%.17g\n", d);
    out << buf;
  }
}

MonteCarloPValue AdLimitCache::upper_tail(double x) const {
  if (draws_.empty())
    throw std::logic_error("AdLimitCache: empty cache");
  const auto above = draws_.end() -
                     std::upper_bound(draws_.begin(), draws_.end(), x);
  const double m = static_cast<double>(draws_.size());
  const double p = static_cast<double>(above) / m;
  return {p, std::sqrt(p * (1.0 - p) / m)};
}

double AdLimitCache::mean() const {
  double acc = 0.0;
  for (const double d : draws_) acc += d;
  return draws_.empty() ? 0.0 : acc / static_cast<double>(draws_.size());
}

MonteCarloPValue tn_pvalue_asymptotic(std::size_t n, DivergenceOrder s,
                                      double tn_value,
                                      const AdLimitCache& cache) {
  if (!(s.s() <= 2.0))
    throw std::domain_error("integral-statistic limit requires s <= 2");
  return cache.upper_tail(static_cast<double>(n) * tn_value);
}

}  // namespace phidiv
