// Test-only oracles, independent of the library's endpoint-reduction and
// closed-form-antiderivative paths: dense-grid suprema and adaptive
// quadrature over the empirical d.f. segments.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "phidiv/divergence.hpp"
#include "phidiv/sample.hpp"

namespace oracle {

inline double ecdf(const std::vector<double>& sorted, double x) {
  const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
  return static_cast<double>(it - sorted.begin()) /
         static_cast<double>(sorted.size());
}

// Scans g(u, x) with u = F_n(x) over every constancy segment intersected
// with [range_lo, range_hi], at `step` resolution plus both closure
// endpoints of each nonempty segment.
inline double segment_scan_sup(const std::vector<double>& sorted,
                               double range_lo, double range_hi,
                               const std::function<double(double, double)>& g,
                               double step) {
  const std::size_t n = sorted.size();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= n; ++i) {
    const double seg_lo = i == 0 ? range_lo : sorted[i - 1];
    const double seg_hi = i == n ? range_hi : sorted[i];
    const double a = std::max(seg_lo, range_lo);
    const double b = std::min(seg_hi, range_hi);
    if (!(b > a)) continue;
    const double u = static_cast<double>(i) / static_cast<double>(n);
    best = std::max(best, std::max(g(u, a), g(u, b)));
    for (double x = a + step; x < b; x += step)
      best = std::max(best, g(u, x));
  }
  return best;
}

inline double sup_oracle(phidiv::DivergenceOrder s,
                         const phidiv::Sample& sample, double step = 1e-5) {
  const auto& v = sample.values();
  const std::size_t n = sample.size();
  const auto g = [&](double u, double x) {
    return phidiv::kdiv_value(s, u, x);
  };
  const bool full = s.s() >= 1.0 - phidiv::DivergenceOrder::kSwitchWidth;
  if (full) return segment_scan_sup(v, 1e-9, 1.0 - 1e-9, g, step);
  if (n == 1) return phidiv::kdiv_value(s, 1.0, v[0]);
  return segment_scan_sup(v, v.front(), v.back(), g, step);
}

inline double sup_plus_oracle(phidiv::DivergenceOrder s,
                              const phidiv::Sample& sample,
                              double x_cap = 0.5, double step = 1e-5) {
  const auto& v = sample.values();
  if (v.front() > x_cap) return 0.0;
  const auto g = [&](double u, double x) {
    return phidiv::kdiv_plus_value(s, u, x);
  };
  // Closed range [X_(1), x_cap]: widen the scan end so the closure point
  // x_cap itself is always probed.
  return std::max(
      0.0, segment_scan_sup(v, v.front(),
                            std::nextafter(x_cap, 1.0), g, step));
}

inline double hc_star_oracle(const phidiv::Sample& sample, double alpha0,
                             double step = 1e-5) {
  const auto& v = sample.values();
  const std::size_t n = sample.size();
  const auto k = static_cast<std::size_t>(
      std::floor(alpha0 * static_cast<double>(n)));
  const double root_n = std::sqrt(static_cast<double>(n));
  const auto g = [&](double u, double x) {
    return root_n * (u - x) / std::sqrt(x * (1.0 - x));
  };
  return segment_scan_sup(v, v.front(), v[k - 1], g, step);
}

inline double adaptive_simpson(const std::function<double(double)>& f,
                               double a, double b, double fa, double fm,
                               double fb, double whole, double tol,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-11) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_simpson(f, a, b, fa, fm, fb,
                          (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 30);
}

inline double tn_oracle(phidiv::DivergenceOrder s,
                        const phidiv::Sample& sample) {
  const auto& v = sample.values();
  const std::size_t n = sample.size();
  const bool full = s.s() > phidiv::DivergenceOrder::kSwitchWidth;
  const std::size_t i_lo = full ? 0 : 1;
  const std::size_t i_hi = full ? n : n - 1;
  double total = 0.0;
  for (std::size_t i = i_lo; i <= i_hi; ++i) {
    const double a = i == 0 ? 1e-13 : v[i - 1];
    const double b = i == n ? 1.0 - 1e-13 : v[i];
    if (!(b > a)) continue;
    const double u = static_cast<double>(i) / static_cast<double>(n);
    total += integrate(
        [&](double x) { return phidiv::kdiv_value(s, u, x); }, a, b);
  }
  return total;
}

}  // namespace oracle
