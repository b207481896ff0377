#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "phidiv/divergence.hpp"
#include "phidiv/sample.hpp"

namespace phidiv {

/// Finite value or a flagged +infinity.
struct ExtendedValue {
  double value = 0.0;
  bool finite = true;
};

/// Alternative distribution functions on [0,1]: the Poisson-boundary family
/// F_s, its s->0 limit, the transformed sparse normal mixture, the uniform
/// null, and user-supplied monotone grids.
class AlternativeCdf {
 public:
  enum class Kind { Uniform, PoissonBoundary, TildeF0, Mixture, UserGrid };

  static AlternativeCdf uniform();
  /// F_s of the boundary family; defined for s >= 1 and s < 0.
  static AlternativeCdf poisson_boundary(double s);
  static AlternativeCdf tilde_f0();
  /// F(u) = u + eps{(1-u) - Phi(Phi^{-1}(1-u) - mu)}.
  static AlternativeCdf mixture(double epsilon, double mu);
  /// Piecewise-linear d.f. through (x_i, F_i); grid must cover 0 and 1.
  static AlternativeCdf user_grid(std::vector<double> x,
                                  std::vector<double> F);

  double cdf(double x) const;
  /// log F(x), exact in the far lower tail for the closed-form kinds.
  double log_cdf(double x) const;
  double quantile(double p) const;
  Sample sample(std::mt19937_64& rng, std::size_t n) const;

  Kind kind() const { return kind_; }
  double order() const { return s_; }
  double epsilon() const { return epsilon_; }
  double mu() const { return mu_; }

 private:
  AlternativeCdf() = default;
  void validate_grid() const;

  Kind kind_ = Kind::Uniform;
  double s_ = 0.0;
  double epsilon_ = 0.0;
  double mu_ = 0.0;
  std::vector<double> grid_x_;
  std::vector<double> grid_f_;
};

/// Sequence-alternative parameters of the sparse-mixture experiment:
/// eps_n = n^-beta, mu_n = sqrt(2 r log n).
struct MixtureParams {
  std::size_t n = 0;
  double beta = 0.0;
  double r = 0.0;

  MixtureParams(std::size_t n_, double beta_, double r_);
  double epsilon() const;
  double mu() const;
};

struct NaturalParameterOptions {
  std::size_t grid_points = 100000;
  double x_min = 1e-18;
  double ceiling = 1e12;
};

/// S_inf(s, F) = sup_x K_s(F(x), x): log-spaced grid scan concentrated at
/// both endpoints, golden-section refinement, and a multiplicative push
/// toward a boundary while the value keeps growing there. Returns the
/// infinite flag when the ceiling is exceeded while still growing.
ExtendedValue natural_parameter(DivergenceOrder s, const AlternativeCdf& alt,
                                const NaturalParameterOptions& opt = {});

/// The s > 1 a.s.-consistency integral
/// int_0^1 (F^{-1}(u)(1-F^{-1}(u)))^{-(s-1)/s} du, by dyadic-shell
/// quadrature toward both endpoints; flagged infinite when the shell
/// contributions stop decaying or the ceiling is passed.
ExtendedValue consistency_integral(DivergenceOrder s,
                                   const AlternativeCdf& alt);

/// Diagnostic for the s = 1 case: int_0^1 F(x)(1-F(x))/(x(1-x)) dx.
ExtendedValue consistency_integral_s1(const AlternativeCdf& alt);

/// Bahadur efficacy g_s(a) = -log(1 - s(1-s)a)/(1-s) for 0 < s < 1 and
/// 0 <= a < 1/(s(1-s)).
double efficacy(DivergenceOrder s, double a);

/// Detection boundary rho*(beta) on (1/2, 1).
double rho_star(double beta);

/// P(sup_{t>=S_1} t/N(t) > x) for x > 1, by its convergent series.
double sup_ratio_tail(double x);

/// One draw of sup_{t>=S_1} t/N(t) from a simulated unit-rate Poisson path.
/// The path stops once a Chernoff union bound certifies that the running
/// max can no longer be beaten (probability < 1e-9), or at max_events with
/// an O(1/sqrt(max_events)) bias on the paths whose sup is at 1.
double sup_ratio_poisson_draw(std::mt19937_64& rng,
                              std::size_t max_events = 200000);

/// Indicator MC for P(sup_{t>=S_1} t/N(t) > x): simulates only far enough
/// to decide the crossing of the fixed barrier x (bias < 1e-9).
bool sup_ratio_exceeds(std::mt19937_64& rng, double x);

/// One draw from the fixed-alternative limit law of S_n(s) under F_s:
/// 1/(s U^s) for s >= 1; (1/(1-s)) (sup t/N(t))^{-s} for s < 0.
double limit_sampler_prop43(DivergenceOrder s, std::mt19937_64& rng);

}  // namespace phidiv
