#pragma once

#include <cstddef>
#include <functional>

#include "phidiv/divergence.hpp"
#include "phidiv/sample.hpp"

namespace phidiv {

enum class StatKind {
  SupTwoSided,
  SupPlus,
  Integral,
  HcStar,
  SupUnrestricted,
  SupUrPlus,
  SupUrMinus,
};

struct StatValue {
  double value = 0.0;
  double s = 0.0;
  StatKind kind = StatKind::SupTwoSided;
  std::size_t n = 0;
};

/// Supremum statistic S_n(s). For s >= 1 the supremum runs over all of
/// (0,1); for s < 1 it is restricted to [X_(1), X_(n)). The supremum over
/// each constancy interval of the empirical d.f. is attained at an interval
/// endpoint (convexity of K_s in its second argument), so the value is an
/// exact max over a finite endpoint set. For n = 1 with s < 1 the restricted
/// range is empty and the single-point value K_s(1, X_(1)) is returned.
StatValue sn(DivergenceOrder s, const Sample& sample);

/// One-sided statistic S_n^+(s) = sup over [X_(1), x_cap] of
/// K_s^+(F_n(x), x). Returns 0 when no point lies at or below x_cap.
/// Callers wanting the n S_n^+(s) scaling multiply by n.
StatValue sn_plus(DivergenceOrder s, const Sample& sample, double x_cap = 0.5);

/// Unrestricted variants, defined for 0 < s < 1 only.
StatValue sn_unrestricted(DivergenceOrder s, const Sample& sample);
StatValue sn_ur_plus(DivergenceOrder s, const Sample& sample);
StatValue sn_ur_minus(DivergenceOrder s, const Sample& sample);

/// Higher-criticism statistic: sup of sqrt(n)(F_n(x) - x)/sqrt(x(1-x)) over
/// [X_(1), X_(floor(alpha0 n))). Signed: the value is negative when the
/// empirical d.f. stays below the diagonal on the whole range.
StatValue hc_star(const Sample& sample, double alpha0 = 0.5);

/// Integral statistic T_n(s): over (0,1) for s > 0, over [X_(1), X_(n)] for
/// s <= 0 (n >= 2 required there). Exact piecewise closed-form integration.
StatValue tn(DivergenceOrder s, const Sample& sample);

/// S_n(s, F): the sup statistic with the null evaluated through an arbitrary
/// continuous d.f. F (the test-inversion dual used by confidence bands).
StatValue sn_against(DivergenceOrder s, const Sample& sample,
                     const std::function<double(double)>& cdf);

}  // namespace phidiv
