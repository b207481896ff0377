#include "phidiv/bands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "phidiv/asymptotic_null.hpp"

namespace phidiv {

namespace {

double effective_s(DivergenceOrder order) {
  switch (order.branch()) {
    case DivergenceOrder::Branch::AtZero:
      return 0.0;
    case DivergenceOrder::Branch::AtOne:
      return 1.0;
    default:
      return order.s();
  }
}

}  // namespace

std::size_t StepBand::interval_of(double x) const {
  const auto it =
      std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return static_cast<std::size_t>(it - breakpoints.begin());
}

std::vector<Interval> band_profile(std::size_t n, DivergenceOrder s,
                                   double q) {
  if (n == 0) throw std::invalid_argument("band_profile: n == 0");
  const double nn = static_cast<double>(n);
  std::vector<Interval> prof(n + 1, Interval{0.0, 1.0});
  if (effective_s(s) >= 1.0) {
    for (std::size_t i = 0; i <= n; ++i)
      prof[i] = invert_in_v(s, static_cast<double>(i) / nn, q);
  } else if (n == 1) {
    // Empty restricted range: the single-point convention constrains only
    // F(X_(1)) through K_s(1, .).
    prof[1] = invert_in_v(s, 1.0, q);
  } else {
    for (std::size_t i = 1; i <= n - 1; ++i)
      prof[i] = invert_in_v(s, static_cast<double>(i) / nn, q);
  }
  for (auto& p : prof) {
    p.lo = std::clamp(p.lo, 0.0, 1.0);
    p.hi = std::clamp(p.hi, 0.0, 1.0);
  }
  for (std::size_t i = 1; i <= n; ++i)
    prof[i].lo = std::max(prof[i].lo, prof[i - 1].lo);
  for (std::size_t i = n; i-- > 0;)
    prof[i].hi = std::min(prof[i].hi, prof[i + 1].hi);
  return prof;
}

StepBand band(const Sample& sample, DivergenceOrder s, double alpha,
              BandMethod method, QuantileCache* cache, std::size_t n_max) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("band: empty sample");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("band: alpha outside (0,1)");
  double q = 0.0;
  if (method == BandMethod::Exact) {
    if (n > n_max)
      throw std::out_of_range(
          "band: n exceeds the exact-null limit; use the asymptotic method");
    q = cache ? cache->quantile(n, s, alpha, n_max)
              : quantile_exact(n, s, alpha, n_max);
  } else {
    q = quantile_asymptotic(n, s, alpha);
  }
  StepBand b;
  b.breakpoints = sample.values();
  b.s = s.s();
  b.alpha = alpha;
  b.quantile = q;
  b.method = method;
  const auto prof = band_profile(n, s, q);
  b.lower.resize(n + 1);
  b.upper.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    b.lower[i] = prof[i].lo;
    b.upper[i] = prof[i].hi;
  }
  return b;
}

bool band_covers(const StepBand& band,
                 const std::function<double(double)>& cdf) {
  const std::size_t n = band.n();
  for (std::size_t i = 0; i <= n; ++i) {
    const double x_left = i == 0 ? 0.0 : band.breakpoints[i - 1];
    const double x_right = i == n ? 1.0 : band.breakpoints[i];
    if (cdf(x_left) < band.lower[i]) return false;
    if (cdf(x_right) > band.upper[i]) return false;
  }
  return true;
}

void write_band_csv(const StepBand& band, std::ostream& out) {
  out << "x_left,x_right,L,U\n";
  char buf[160];
  const std::size_t n = band.n();
  for (std::size_t i = 0; i <= n; ++i) {
    const double x_left = i == 0 ? 0.0 : band.breakpoints[i - 1];
    const double x_right = i == n ? 1.0 : band.breakpoints[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x_left,
                  x_right, band.lower[i], band.upper[i]);
    out << buf;
  }
}

std::string band_to_json(const StepBand& band) {
  std::ostringstream out;
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "{\"n\":" << band.n() << ",\"s\":" << num(band.s)
      << ",\"alpha\":" << num(band.alpha)
      << ",\"quantile\":" << num(band.quantile) << ",\"method\":\""
      << (band.method == BandMethod::Exact ? "exact" : "asymptotic")
      << "\",\"breakpoints\":[";
  for (std::size_t i = 0; i < band.breakpoints.size(); ++i)
    out << (i ? "," : "") << num(band.breakpoints[i]);
  out << "],\"lower\":[";
  for (std::size_t i = 0; i < band.lower.size(); ++i)
    out << (i ? "," : "") << num(band.lower[i]);
  out << "],\"upper\":[";
  for (std::size_t i = 0; i < band.upper.size(); ++i)
    out << (i ? "," : "") << num(band.upper[i]);
  out << "]}";
  return out.str();
}

}  // namespace phidiv
