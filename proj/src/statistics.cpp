#include "phidiv/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phidiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Effective order after limit-branch dispatch; all range dichotomies
// (s >= 1, s > 0, ...) use this so the restriction rules agree with the
// kernel branch actually evaluated.
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

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// b^h - a^h for 0 <= a <= b, anchored so the expm1 argument is nonpositive
// (no cancellation near h = 0, no overflow for extreme ratios).
double pow_diff(double a, double b, double h) {
  if (a == b) return 0.0;
  if (a == 0.0) return std::pow(b, h);
  if (h >= 0.0) return -std::pow(b, h) * std::expm1(h * std::log(a / b));
  return std::pow(a, h) * std::expm1(h * std::log(b / a));
}

// Integral of K_s(c, x) dx over [x0, x1] for the generic branch.
double segment_integral_generic(double s, double c, double x0, double x1) {
  double acc = x1 - x0;
  const double h = 2.0 - s;
  if (c > 0.0) acc -= std::pow(c, s) * pow_diff(x0, x1, h) / h;
  if (c < 1.0)
    acc -= std::pow(1.0 - c, s) * pow_diff(1.0 - x1, 1.0 - x0, h) / h;
  return acc / (s * (1.0 - s));
}

double segment_integral_s1(double c, double x0, double x1) {
  double acc = (xlogx(c) + xlogx(1.0 - c)) * (x1 - x0);
  if (c > 0.0) acc -= c * (xlogx(x1) - x1 - (xlogx(x0) - x0));
  if (c < 1.0)
    acc += (1.0 - c) *
           (xlogx(1.0 - x1) - (1.0 - x1) - (xlogx(1.0 - x0) - (1.0 - x0)));
  return acc;
}

double segment_integral_s0(double c, double x0, double x1) {
  const auto at = [&](double x) {
    const double y = 1.0 - x;
    return 0.5 * x * xlogx(x) - 0.25 * x * x - 0.5 * x * x * std::log(c) -
           0.5 * y * xlogx(y) + 0.25 * y * y + 0.5 * y * y * std::log(1.0 - c);
  };
  return at(x1) - at(x0);
}

double segment_integral_s2(double c, double x0, double x1) {
  double a = -2.0 * c * (x1 - x0) + 0.5 * (x1 * x1 - x0 * x0);
  if (c > 0.0) a += c * c * std::log(x1 / x0);
  double b = -2.0 * (1.0 - c) * (x1 - x0) -
             0.5 * ((1.0 - x1) * (1.0 - x1) - (1.0 - x0) * (1.0 - x0));
  if (c < 1.0)
    b -= (1.0 - c) * (1.0 - c) * std::log((1.0 - x1) / (1.0 - x0));
  return 0.5 * (a + b);
}

double segment_integral(DivergenceOrder order, double c, double x0,
                        double x1) {
  if (x1 <= x0) return 0.0;
  switch (order.branch()) {
    case DivergenceOrder::Branch::AtOne:
      return segment_integral_s1(c, x0, x1);
    case DivergenceOrder::Branch::AtZero:
      return segment_integral_s0(c, x0, x1);
    case DivergenceOrder::Branch::AtTwo:
      return segment_integral_s2(c, x0, x1);
    default:
      return segment_integral_generic(order.s(), c, x0, x1);
  }
}

}  // namespace

StatValue sn(DivergenceOrder order, const Sample& sample) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("sn: empty sample");
  const double nn = static_cast<double>(n);
  double best = 0.0;
  if (effective_s(order) >= 1.0) {
    // Segments i = 0..n; the outer limits K_s(0, 0+) and K_s(1, 1-) are 0.
    for (std::size_t i = 0; i <= n; ++i) {
      const double u = static_cast<double>(i) / nn;
      if (i >= 1) best = std::max(best, kdiv_value(order, u, sample.order_stat(i)));
      if (i < n)
        best = std::max(best, kdiv_value(order, u, sample.order_stat(i + 1)));
    }
  } else if (n == 1) {
    best = kdiv_value(order, 1.0, sample.order_stat(1));
  } else {
    for (std::size_t i = 1; i < n; ++i) {
      const double u = static_cast<double>(i) / nn;
      best = std::max(best, kdiv_value(order, u, sample.order_stat(i)));
      best = std::max(best, kdiv_value(order, u, sample.order_stat(i + 1)));
    }
  }
  return {best, order.s(), StatKind::SupTwoSided, n};
}

StatValue sn_plus(DivergenceOrder order, const Sample& sample, double x_cap) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("sn_plus: empty sample");
  const double nn = static_cast<double>(n);
  double best = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double lo = sample.order_stat(i);
    if (lo > x_cap) break;
    const double hi = std::min(i < n ? sample.order_stat(i + 1) : 1.0, x_cap);
    const double u = static_cast<double>(i) / nn;
    best = std::max(best, kdiv_plus_value(order, u, lo));
    best = std::max(best, kdiv_plus_value(order, u, hi));
  }
  return {best, order.s(), StatKind::SupPlus, n};
}

namespace {

StatValue sup_unrestricted_impl(DivergenceOrder order, const Sample& sample,
                                StatKind kind) {
  const double s = effective_s(order);
  if (!(s > 0.0 && s < 1.0))
    throw std::domain_error("unrestricted statistics require 0 < s < 1");
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("empty sample");
  const double nn = static_cast<double>(n);
  const auto kernel = [&](double u, double v) {
    switch (kind) {
      case StatKind::SupUrPlus:
        return kdiv_plus_value(order, u, v);
      case StatKind::SupUrMinus:
        return kdiv_minus_value(order, u, v);
      default:
        return kdiv_value(order, u, v);
    }
  };
  double best = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double u = static_cast<double>(i) / nn;
    if (i >= 1) best = std::max(best, kernel(u, sample.order_stat(i)));
    if (i < n) best = std::max(best, kernel(u, sample.order_stat(i + 1)));
  }
  return {best, order.s(), kind, n};
}

}  // namespace

StatValue sn_unrestricted(DivergenceOrder order, const Sample& sample) {
  return sup_unrestricted_impl(order, sample, StatKind::SupUnrestricted);
}

StatValue sn_ur_plus(DivergenceOrder order, const Sample& sample) {
  return sup_unrestricted_impl(order, sample, StatKind::SupUrPlus);
}

StatValue sn_ur_minus(DivergenceOrder order, const Sample& sample) {
  return sup_unrestricted_impl(order, sample, StatKind::SupUrMinus);
}

StatValue hc_star(const Sample& sample, double alpha0) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("hc_star: empty sample");
  if (!(alpha0 > 0.0 && alpha0 <= 1.0))
    throw std::domain_error("hc_star: alpha0 outside (0,1]");
  const std::size_t k =
      static_cast<std::size_t>(std::floor(alpha0 * static_cast<double>(n)));
  if (k < 1) throw std::invalid_argument("hc_star: floor(alpha0*n) < 1");
  const double nn = static_cast<double>(n);
  const double root_n = std::sqrt(nn);
  double best = -kInf;
  bool any = false;
  // Segment k-1 is clipped by the strict upper limit X_(k): its right
  // endpoint enters only as the left limit, which coincides with the
  // endpoint value by continuity.
  for (std::size_t i = 1; i < k; ++i) {
    const double lo = sample.order_stat(i);
    const double hi = sample.order_stat(i + 1);
    if (lo >= hi) continue;  // tie: empty segment
    const double u = static_cast<double>(i) / nn;
    const auto g = [&](double v) {
      return root_n * (u - v) / std::sqrt(v * (1.0 - v));
    };
    best = std::max(best, std::max(g(lo), g(hi)));
    any = true;
  }
  if (!any) throw std::invalid_argument("hc_star: empty supremum range");
  return {best, 2.0, StatKind::HcStar, n};
}

StatValue tn(DivergenceOrder order, const Sample& sample) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("tn: empty sample");
  const double nn = static_cast<double>(n);
  double total = 0.0;
  if (effective_s(order) > 0.0) {
    for (std::size_t i = 0; i <= n; ++i) {
      const double c = static_cast<double>(i) / nn;
      const double x0 = i == 0 ? 0.0 : sample.order_stat(i);
      const double x1 = i == n ? 1.0 : sample.order_stat(i + 1);
      total += segment_integral(order, c, x0, x1);
    }
  } else {
    if (n < 2) throw std::invalid_argument("tn: s <= 0 requires n >= 2");
    for (std::size_t i = 1; i < n; ++i) {
      total += segment_integral(order, static_cast<double>(i) / nn,
                                sample.order_stat(i), sample.order_stat(i + 1));
    }
  }
  return {std::max(total, 0.0), order.s(), StatKind::Integral, n};
}

StatValue sn_against(DivergenceOrder order, const Sample& sample,
                     const std::function<double(double)>& cdf) {
  const std::size_t n = sample.size();
  if (n == 0) throw std::invalid_argument("sn_against: empty sample");
  const double nn = static_cast<double>(n);
  const auto eval = [&](double u, double x) {
    const double v = std::clamp(cdf(x), 0.0, 1.0);
    if (v <= 0.0) return u == 0.0 ? 0.0 : kdiv_limit_v0(order, u);
    if (v >= 1.0) return u == 1.0 ? 0.0 : kdiv_limit_v1(order, u);
    return kdiv_value(order, u, v);
  };
  double best = 0.0;
  if (effective_s(order) >= 1.0) {
    for (std::size_t i = 0; i <= n; ++i) {
      const double u = static_cast<double>(i) / nn;
      const double x0 = i == 0 ? 0.0 : sample.order_stat(i);
      const double x1 = i == n ? 1.0 : sample.order_stat(i + 1);
      best = std::max(best, std::max(eval(u, x0), eval(u, x1)));
    }
  } else {
    if (n == 1) {
      best = eval(1.0, sample.order_stat(1));
    } else {
      for (std::size_t i = 1; i < n; ++i) {
        const double u = static_cast<double>(i) / nn;
        best = std::max(best, eval(u, sample.order_stat(i)));
        best = std::max(best, eval(u, sample.order_stat(i + 1)));
      }
    }
  }
  return {best, order.s(), StatKind::SupTwoSided, n};
}

}  // namespace phidiv
