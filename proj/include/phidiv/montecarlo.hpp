#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "phidiv/alternatives.hpp"
#include "phidiv/bands.hpp"
#include "phidiv/exact_null.hpp"

namespace phidiv {

struct RateWithSE {
  double rate = 0.0;
  double se = 0.0;
};

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  std::size_t count = 0;
};

/// Seeded experiment description. Per-replication generators derive from
/// (seed, replication index, stream), so identical plans give bit-identical
/// results for any worker count.
struct ExperimentPlan {
  enum class Kind { NullCalibration, BandCoverage, PoissonBoundary, Detection };
  enum class Method { Exact, Asymptotic };

  Kind kind = Kind::NullCalibration;
  std::size_t n = 100;
  std::vector<double> s_list{1.0};
  std::size_t reps = 1000;
  double alpha = 0.05;
  double beta = 0.75;  // detection mixture: eps_n = n^-beta
  double r = 0.15;     //                    mu_n = sqrt(2 r log n)
  double x_cap = 0.5;
  std::uint64_t seed = 1;
  Method method = Method::Exact;
  std::size_t threads = 0;
  bool keep_draws = false;
  std::size_t histogram_bins = 60;
};

struct PerOrderSummary {
  double s = 0.0;
  // null calibration
  RateWithSE reject_exact;
  RateWithSE reject_asymptotic;
  double critical_exact = 0.0;
  double critical_asymptotic = 0.0;
  double mean_ntn = 0.0;
  // band coverage
  RateWithSE coverage;
  // poisson boundary
  double ks_vs_limit = 0.0;
  // detection
  double threshold = 0.0;
  RateWithSE size;
  RateWithSE power;
  double h0_mean_centered = 0.0;
  double h1_mean_centered = 0.0;
  std::vector<HistogramBin> h0_centered_hist;
  std::vector<HistogramBin> h1_centered_hist;
  // optional raw draws (statistic under H0/alt, limit draws, S+ values)
  std::vector<double> draws;
  std::vector<double> draws_alt;
  std::vector<double> draws_limit;
};

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<PerOrderSummary> per_s;
  double runtime_seconds = 0.0;

  std::string to_json() const;
  /// Histogram rows `s,hypothesis,bin_left,bin_right,count`.
  void write_histograms_csv(std::ostream& out) const;
};

ExperimentResult run_null_calibration(const ExperimentPlan& plan,
                                      QuantileCache* cache = nullptr);
ExperimentResult run_band_coverage(const ExperimentPlan& plan,
                                   QuantileCache* cache = nullptr);
ExperimentResult run_poisson_boundary(const ExperimentPlan& plan);
ExperimentResult run_detection(const ExperimentPlan& plan);

/// Dispatch on plan.kind.
ExperimentResult run_experiment(const ExperimentPlan& plan,
                                QuantileCache* cache = nullptr);

}  // namespace phidiv
