#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "phidiv/divergence.hpp"
#include "phidiv/exact_null.hpp"
#include "phidiv/sample.hpp"

namespace phidiv {

enum class BandMethod { Exact, Asymptotic };

/// Piecewise-constant simultaneous confidence band for a continuous d.f.
/// The band is constant on each of the n+1 intervals delimited by the
/// sorted sample values; lower/upper hold those interval values.
struct StepBand {
  std::vector<double> breakpoints;
  std::vector<double> lower;
  std::vector<double> upper;
  double s = 0.0;
  double alpha = 0.0;
  double quantile = 0.0;
  BandMethod method = BandMethod::Exact;

  std::size_t n() const { return breakpoints.size(); }
  std::size_t interval_of(double x) const;
  double lower_at(double x) const { return lower[interval_of(x)]; }
  double upper_at(double x) const { return upper[interval_of(x)]; }
};

/// Interval band values for a given quantile level; depends on the sample
/// only through n. Interval i carries the inversion of K_s(i/n, .) at level
/// q, with the outer intervals unconstrained for s < 1 (restricted
/// supremum), then isotonized (cumulative max / suffix min).
std::vector<Interval> band_profile(std::size_t n, DivergenceOrder s, double q);

/// 1-alpha simultaneous band from inverting {S_n(s, F) <= q_n(s, alpha)}.
/// `cache`, when given, provides/stores exact quantiles.
StepBand band(const Sample& sample, DivergenceOrder s, double alpha,
              BandMethod method, QuantileCache* cache = nullptr,
              std::size_t n_max = 3000);

/// True iff lower <= F <= upper everywhere, checked at the interval
/// endpoints (sufficient for continuous nondecreasing F).
bool band_covers(const StepBand& band,
                 const std::function<double(double)>& cdf);

/// CSV rows `x_left,x_right,L,U`.
void write_band_csv(const StepBand& band, std::ostream& out);
/// JSON object with interval arrays and the construction metadata.
std::string band_to_json(const StepBand& band);

}  // namespace phidiv
