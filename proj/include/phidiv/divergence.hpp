#pragma once

#include <limits>
#include <stdexcept>

namespace phidiv {

/// Order parameter s of the phi-divergence family, with branch dispatch.
///
/// The generic kernel has removable singularities at s = 0 and s = 1;
/// evaluation within kSwitchWidth of those points uses the exact limit
/// branches, and s = 2 uses its closed form.
class DivergenceOrder {
 public:
  enum class Branch { Generic, AtZero, AtOne, AtTwo };

  static constexpr double kSwitchWidth = 1e-8;

  explicit DivergenceOrder(double s) : s_(s) {
    if (!(s == s) || s == std::numeric_limits<double>::infinity() ||
        s == -std::numeric_limits<double>::infinity()) {
      throw std::domain_error("DivergenceOrder: s must be finite");
    }
    if (s > -kSwitchWidth && s < kSwitchWidth) {
      branch_ = Branch::AtZero;
    } else if (s > 1.0 - kSwitchWidth && s < 1.0 + kSwitchWidth) {
      branch_ = Branch::AtOne;
    } else if (s == 2.0) {
      branch_ = Branch::AtTwo;
    } else {
      branch_ = Branch::Generic;
    }
  }

  double s() const { return s_; }
  Branch branch() const { return branch_; }

 private:
  double s_;
  Branch branch_;
};

/// Extended nonnegative divergence value. Infinity is carried as an explicit
/// flag; `value` holds +inf in that case for convenience but arithmetic
/// should branch on `finite`.
struct KernelValue {
  double value = 0.0;
  bool finite = true;

  static KernelValue of(double v) { return {v, true}; }
  static KernelValue infinite() {
    return {std::numeric_limits<double>::infinity(), false};
  }
  double as_double() const { return value; }
};

/// Closed interval endpoints from a convex-function sub-level set.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// phi_s(x) for x >= 0. Throws std::domain_error for x < 0.
/// phi_s(1) = 0; the x = 0 value is the branch limit (finite 1/s for s > 0,
/// +inf for s <= 0).
double phi(DivergenceOrder s, double x);

/// K_s(u, v) = v phi_s(u/v) + (1-v) phi_s((1-u)/(1-v)) with u in [0,1],
/// v in (0,1). Values at u = 0 and u = 1 are the algebraic limits (finite
/// for s > 0, infinite for s <= 0 at the offending endpoint).
/// Throws std::domain_error when u or v is out of range.
KernelValue kdiv(DivergenceOrder s, double u, double v);

/// One-sided kernels: kdiv when u > v (resp. u < v), zero otherwise.
KernelValue kdiv_plus(DivergenceOrder s, double u, double v);
KernelValue kdiv_minus(DivergenceOrder s, double u, double v);

/// Unchecked fast path for K_s(u, v); may return +inf. Preconditions as
/// kdiv but not validated.
double kdiv_value(DivergenceOrder s, double u, double v) noexcept;
double kdiv_plus_value(DivergenceOrder s, double u, double v) noexcept;
double kdiv_minus_value(DivergenceOrder s, double u, double v) noexcept;

/// Limits of K_s(u, v) as v -> 0+ and v -> 1-.
double kdiv_limit_v0(DivergenceOrder s, double u) noexcept;
double kdiv_limit_v1(DivergenceOrder s, double u) noexcept;

/// Partial derivatives at interior points, used by the Newton polish.
double kdiv_dv(DivergenceOrder s, double u, double v) noexcept;
double kdiv_du(DivergenceOrder s, double u, double v) noexcept;
/// Curvature d^2 K_s / du^2 (u, v interior).
double kdiv_d2u(DivergenceOrder s, double u, double v) noexcept;

/// {v in (0,1) : K_s(u, v) <= lambda} as a closed interval containing u.
/// K_s(u, .) is convex with minimum 0 at v = u, so the set is an interval;
/// endpoints are located by bracketed bisection to absolute tolerance `tol`
/// followed by a guarded Newton polish. An endpoint saturates to 0 or 1 when
/// the level-lambda constraint is slack all the way to that boundary.
Interval invert_in_v(DivergenceOrder s, double u, double lambda,
                     double tol = 1e-12);

/// {u in [0,1] : K_s(u, v) <= lambda}, same structure in the first argument.
Interval invert_in_u(DivergenceOrder s, double v, double lambda,
                     double tol = 1e-12);

/// tau_s^+(x, a) = inf{t : K_s^+(t, x) >= a}: the unique root of
/// K_s(t, x) = a in (x, 1) when a < K_s(1, x), x when a = 0, and 1 when the
/// level a is unattainable.
double tau_plus(DivergenceOrder s, double x, double a);

}  // namespace phidiv
