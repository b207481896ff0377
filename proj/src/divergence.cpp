#include "phidiv/divergence.hpp"

#include <algorithm>
#include <cmath>

namespace phidiv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// u^s * v^(1-s) with the boundary conventions for u in {0, 1}.
double tilted_term(double s, double u, double v) {
  if (u == 0.0) return s > 0.0 ? 0.0 : kInf;
  if (u == 1.0) return std::exp((1.0 - s) * std::log(v));
  return std::exp(s * std::log(u) + (1.0 - s) * std::log(v));
}

}  // namespace

double phi(DivergenceOrder order, double x) {
  if (!(x >= 0.0)) throw std::domain_error("phi: x must be >= 0");
  const double s = order.s();
  switch (order.branch()) {
    case DivergenceOrder::Branch::AtOne:
      if (x == 0.0) return 1.0;
      return std::max(x * (std::log(x) - 1.0) + 1.0, 0.0);
    case DivergenceOrder::Branch::AtZero:
      if (x == 0.0) return kInf;
      return std::max(-std::log(x) + x - 1.0, 0.0);
    case DivergenceOrder::Branch::AtTwo:
      return 0.5 * (x - 1.0) * (x - 1.0);
    case DivergenceOrder::Branch::Generic:
    default:
      if (x == 0.0) return s > 0.0 ? 1.0 / s : kInf;
      return std::max(
          (1.0 - s + s * x - std::pow(x, s)) / (s * (1.0 - s)), 0.0);
  }
}

double kdiv_value(DivergenceOrder order, double u, double v) noexcept {
  const double s = order.s();
  switch (order.branch()) {
    case DivergenceOrder::Branch::AtTwo: {
      const double d = u - v;
      return 0.5 * d * d / (v * (1.0 - v));
    }
    case DivergenceOrder::Branch::AtOne: {
      if (u == 0.0) return -std::log1p(-v);
      if (u == 1.0) return -std::log(v);
      return std::max(u * std::log(u / v) +
                          (1.0 - u) * std::log((1.0 - u) / (1.0 - v)),
                      0.0);
    }
    case DivergenceOrder::Branch::AtZero: {
      if (u == 0.0 || u == 1.0) return kInf;
      return std::max(v * std::log(v / u) +
                          (1.0 - v) * std::log((1.0 - v) / (1.0 - u)),
                      0.0);
    }
    case DivergenceOrder::Branch::Generic:
    default: {
      const double t1 = tilted_term(s, u, v);
      const double t2 = tilted_term(s, 1.0 - u, 1.0 - v);
      if (t1 == kInf || t2 == kInf) return kInf;
      return std::max((1.0 - t1 - t2) / (s * (1.0 - s)), 0.0);
    }
  }
}

KernelValue kdiv(DivergenceOrder s, double u, double v) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("kdiv: u outside [0,1]");
  if (!(v > 0.0 && v < 1.0)) throw std::domain_error("kdiv: v outside (0,1)");
  const double k = kdiv_value(s, u, v);
  return k == kInf ? KernelValue::infinite() : KernelValue::of(k);
}

double kdiv_plus_value(DivergenceOrder s, double u, double v) noexcept {
  return u <= v ? 0.0 : kdiv_value(s, u, v);
}

double kdiv_minus_value(DivergenceOrder s, double u, double v) noexcept {
  return u >= v ? 0.0 : kdiv_value(s, u, v);
}

KernelValue kdiv_plus(DivergenceOrder s, double u, double v) {
  if (u <= v) {
    if (!(u >= 0.0)) throw std::domain_error("kdiv_plus: u outside [0,1]");
    if (!(v > 0.0 && v < 1.0))
      throw std::domain_error("kdiv_plus: v outside (0,1)");
    return KernelValue::of(0.0);
  }
  return kdiv(s, u, v);
}

KernelValue kdiv_minus(DivergenceOrder s, double u, double v) {
  if (u >= v) {
    if (!(u <= 1.0)) throw std::domain_error("kdiv_minus: u outside [0,1]");
    if (!(v > 0.0 && v < 1.0))
      throw std::domain_error("kdiv_minus: v outside (0,1)");
    return KernelValue::of(0.0);
  }
  return kdiv(s, u, v);
}

double kdiv_limit_v0(DivergenceOrder order, double u) noexcept {
  if (u == 0.0) return 0.0;
  const double s = order.s();
  if (s >= 1.0 - DivergenceOrder::kSwitchWidth) return kInf;
  if (order.branch() == DivergenceOrder::Branch::AtZero) {
    return u == 1.0 ? kInf : -std::log1p(-u);
  }
  // s < 1, s != 0: lim = (1 - (1-u)^s) / (s(1-s))
  if (u == 1.0) return s > 0.0 ? 1.0 / (s * (1.0 - s)) : kInf;
  return (1.0 - std::pow(1.0 - u, s)) / (s * (1.0 - s));
}

double kdiv_limit_v1(DivergenceOrder order, double u) noexcept {
  return kdiv_limit_v0(order, 1.0 - u);
}

double kdiv_dv(DivergenceOrder order, double u, double v) noexcept {
  const double s = order.s();
  const double a = (1.0 - u) / (1.0 - v);
  const double b = u / v;
  if (order.branch() == DivergenceOrder::Branch::AtZero) {
    return std::log(a) - std::log(b);
  }
  return (std::pow(a, s) - std::pow(b, s)) / s;
}

double kdiv_du(DivergenceOrder order, double u, double v) noexcept {
  const double s = order.s();
  const double a = u / v;
  const double b = (1.0 - u) / (1.0 - v);
  switch (order.branch()) {
    case DivergenceOrder::Branch::AtOne:
      return std::log(a) - std::log(b);
    case DivergenceOrder::Branch::AtZero:
      return 1.0 / b - 1.0 / a;
    default:
      // phi'_s(x) = (1 - x^(s-1)) / (1-s)
      return (std::pow(b, s - 1.0) - std::pow(a, s - 1.0)) / (1.0 - s);
  }
}

double kdiv_d2u(DivergenceOrder order, double u, double v) noexcept {
  const double s = order.s();
  return std::pow(u / v, s - 2.0) / v +
         std::pow((1.0 - u) / (1.0 - v), s - 2.0) / (1.0 - v);
}

namespace {

// Locates the boundary of {x : f(x) <= lambda} between an out-point and an
// in-point, f monotone on the bracket. Returns a point within tol of the
// level crossing, Newton-polished when a finite derivative is supplied.
template <typename F, typename DF>
double bisect_level(const F& f, const DF& df, double out, double in,
                    double lambda, double tol) {
  while (std::fabs(in - out) > tol) {
    const double mid = 0.5 * (in + out);
    if (mid == in || mid == out) break;
    if (f(mid) <= lambda) {
      in = mid;
    } else {
      out = mid;
    }
  }
  double x = 0.5 * (in + out);
  const double lo = std::min(in, out), hi = std::max(in, out);
  for (int i = 0; i < 3; ++i) {
    const double g = df(x);
    if (!std::isfinite(g) || g == 0.0) break;
    const double step = (f(x) - lambda) / g;
    const double next = x - step;
    if (!(next > lo - tol && next < hi + tol) || !std::isfinite(next)) break;
    x = next;
  }
  return std::clamp(x, lo, hi);
}

}  // namespace

Interval invert_in_v(DivergenceOrder s, double u, double lambda, double tol) {
  if (!(lambda > 0.0)) throw std::domain_error("invert_in_v: lambda <= 0");
  if (!(u >= 0.0 && u <= 1.0))
    throw std::domain_error("invert_in_v: u outside [0,1]");
  const auto eval = [&](double v) {
    if (v <= 0.0) return kdiv_limit_v0(s, u);
    if (v >= 1.0) return kdiv_limit_v1(s, u);
    return kdiv_value(s, u, v);
  };
  const auto slope = [&](double v) {
    return (v > 0.0 && v < 1.0) ? kdiv_dv(s, u, v) : kInf;
  };
  Interval r;
  r.lo = (u == 0.0 || eval(0.0) <= lambda)
             ? 0.0
             : bisect_level(eval, slope, 0.0, u, lambda, tol);
  r.hi = (u == 1.0 || eval(1.0) <= lambda)
             ? 1.0
             : bisect_level(eval, slope, 1.0, u, lambda, tol);
  return r;
}

Interval invert_in_u(DivergenceOrder s, double v, double lambda, double tol) {
  if (!(lambda > 0.0)) throw std::domain_error("invert_in_u: lambda <= 0");
  if (!(v > 0.0 && v < 1.0))
    throw std::domain_error("invert_in_u: v outside (0,1)");
  const auto eval = [&](double u) { return kdiv_value(s, u, v); };
  const auto slope = [&](double u) {
    return (u > 0.0 && u < 1.0) ? kdiv_du(s, u, v) : kInf;
  };
  Interval r;
  r.lo = eval(0.0) <= lambda ? 0.0
                             : bisect_level(eval, slope, 0.0, v, lambda, tol);
  r.hi = eval(1.0) <= lambda ? 1.0
                             : bisect_level(eval, slope, 1.0, v, lambda, tol);
  return r;
}

double tau_plus(DivergenceOrder s, double x, double a) {
  if (!(x > 0.0 && x < 1.0)) throw std::domain_error("tau_plus: x outside (0,1)");
  if (!(a >= 0.0)) throw std::domain_error("tau_plus: a < 0");
  if (a == 0.0) return x;
  if (kdiv_value(s, 1.0, x) <= a) return 1.0;
  return invert_in_u(s, x, a).hi;
}

}  // namespace phidiv
