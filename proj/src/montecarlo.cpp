#include "phidiv/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "phidiv/asymptotic_null.hpp"
#include "phidiv/parallel.hpp"
#include "phidiv/rng.hpp"
#include "phidiv/statistics.hpp"

namespace phidiv {

namespace {

constexpr std::uint64_t kStreamData = 1;
constexpr std::uint64_t kStreamAlt = 2;
constexpr std::uint64_t kStreamLimit = 3;

RateWithSE rate_of(const std::vector<std::uint8_t>& hits) {
  double acc = 0.0;
  for (const auto h : hits) acc += h;
  const double m = static_cast<double>(hits.size());
  const double p = m > 0.0 ? acc / m : 0.0;
  return {p, m > 0.0 ? std::sqrt(p * (1.0 - p) / m) : 0.0};
}

Sample uniform_sample(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> values(n);
  for (auto& x : values) x = uniform01_open(rng);
  return Sample(std::move(values));
}

double finite_mean(const std::vector<double>& xs) {
  double acc = 0.0;
  std::size_t m = 0;
  for (const double x : xs) {
    if (std::isfinite(x)) {
      acc += x;
      ++m;
    }
  }
  return m > 0 ? acc / static_cast<double>(m) : 0.0;
}

std::vector<HistogramBin> make_histogram(const std::vector<double>& xs,
                                         double lo, double hi,
                                         std::size_t bins) {
  std::vector<HistogramBin> h(bins);
  if (!(hi > lo) || bins == 0) return h;
  const double w = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    h[b].left = lo + w * static_cast<double>(b);
    h[b].right = h[b].left + w;
  }
  for (const double x : xs) {
    if (!std::isfinite(x) || x < lo || x > hi) continue;
    const auto b = std::min(
        bins - 1, static_cast<std::size_t>((x - lo) / w));
    ++h[b].count;
  }
  return h;
}

// Two-sample Kolmogorov distance; inputs need not be sorted.
double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace

ExperimentResult run_null_calibration(const ExperimentPlan& plan,
                                      QuantileCache* cache) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.plan = plan;
  const std::size_t n = plan.n;
  const std::size_t reps = plan.reps;
  const std::size_t ns = plan.s_list.size();

  std::vector<double> q_exact(ns, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> q_asym(ns, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < ns; ++k) {
    const DivergenceOrder s(plan.s_list[k]);
    if (n <= 3000)
      q_exact[k] = cache ? cache->quantile(n, s, plan.alpha)
                         : quantile_exact(n, s, plan.alpha);
    if (n >= 16 && plan.s_list[k] >= -1.0 && plan.s_list[k] <= 2.0)
      q_asym[k] = quantile_asymptotic(n, s, plan.alpha);
  }

  std::vector<std::vector<std::uint8_t>> hit_exact(ns),
      hit_asym(ns);
  std::vector<std::vector<double>> ntn(ns), sup_draws(ns);
  for (std::size_t k = 0; k < ns; ++k) {
    hit_exact[k].assign(reps, 0);
    hit_asym[k].assign(reps, 0);
    ntn[k].assign(reps, 0.0);
    sup_draws[k].assign(reps, 0.0);
  }

  parallel_chunks(reps, plan.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      auto rng = rep_rng(plan.seed, rep, kStreamData);
      const Sample sample = uniform_sample(rng, n);
      for (std::size_t k = 0; k < ns; ++k) {
        const DivergenceOrder s(plan.s_list[k]);
        const double sup_value = sn(s, sample).value;
        hit_exact[k][rep] = !std::isnan(q_exact[k]) && sup_value > q_exact[k];
        hit_asym[k][rep] = !std::isnan(q_asym[k]) && sup_value > q_asym[k];
        ntn[k][rep] = static_cast<double>(n) * tn(s, sample).value;
        sup_draws[k][rep] = sup_value;
      }
    }
  });

  for (std::size_t k = 0; k < ns; ++k) {
    PerOrderSummary out;
    out.s = plan.s_list[k];
    out.critical_exact = q_exact[k];
    out.critical_asymptotic = q_asym[k];
    out.reject_exact = rate_of(hit_exact[k]);
    out.reject_asymptotic = rate_of(hit_asym[k]);
    out.mean_ntn = finite_mean(ntn[k]);
    if (plan.keep_draws) out.draws = std::move(sup_draws[k]);
    result.per_s.push_back(std::move(out));
  }
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

ExperimentResult run_band_coverage(const ExperimentPlan& plan,
                                   QuantileCache* cache) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.plan = plan;
  const std::size_t n = plan.n;
  const std::size_t reps = plan.reps;
  const std::size_t ns = plan.s_list.size();

  // The interval band values depend on the sample only through n, so the
  // per-order profile is built once and reused across replications.
  std::vector<std::vector<Interval>> profiles(ns);
  for (std::size_t k = 0; k < ns; ++k) {
    const DivergenceOrder s(plan.s_list[k]);
    const double q =
        plan.method == ExperimentPlan::Method::Exact
            ? (cache ? cache->quantile(n, s, plan.alpha)
                     : quantile_exact(n, s, plan.alpha))
            : quantile_asymptotic(n, s, plan.alpha);
    profiles[k] = band_profile(n, s, q);
  }

  std::vector<std::vector<std::uint8_t>> covered(ns);
  for (auto& c : covered) c.assign(reps, 0);

  parallel_chunks(reps, plan.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t rep = begin; rep < end; ++rep) {
      auto rng = rep_rng(plan.seed, rep, kStreamData);
      const Sample sample = uniform_sample(rng, n);
      for (std::size_t k = 0; k < ns; ++k) {
        const auto& prof = profiles[k];
        bool ok = true;
        for (std::size_t i = 0; i <= n && ok; ++i) {
          const double x_left = i == 0 ? 0.0 : sample.order_stat(i);
          const double x_right = i == n ? 1.0 : sample.order_stat(i + 1);
          ok = prof[i].lo <= x_left && x_right <= prof[i].hi;
        }
        covered[k][rep] = ok;
      }
    }
  });

  for (std::size_t k = 0; k < ns; ++k) {
    PerOrderSummary out;
    out.s = plan.s_list[k];
    out.coverage = rate_of(covered[k]);
    result.per_s.push_back(std::move(out));
  }
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

ExperimentResult run_poisson_boundary(const ExperimentPlan& plan) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.plan = plan;
  const std::size_t n = plan.n;
  const std::size_t reps = plan.reps;

  for (const double s_value : plan.s_list) {
    const DivergenceOrder s(s_value);
    const auto alt = AlternativeCdf::poisson_boundary(s_value);
    std::vector<double> stat_draws(reps), limit_draws(reps);
    parallel_chunks(
        reps, plan.threads, [&](std::size_t begin, std::size_t end) {
          for (std::size_t rep = begin; rep < end; ++rep) {
            auto rng = rep_rng(plan.seed, rep, kStreamAlt);
            const Sample sample = alt.sample(rng, n);
            stat_draws[rep] = sn(s, sample).value;
            auto lrng = rep_rng(plan.seed, rep, kStreamLimit);
            limit_draws[rep] = limit_sampler_prop43(s, lrng);
          }
        });
    PerOrderSummary out;
    out.s = s_value;
    out.ks_vs_limit = ks_distance(stat_draws, limit_draws);
    out.draws = std::move(stat_draws);
    out.draws_limit = std::move(limit_draws);
    if (!plan.keep_draws) {
      // KS summary retained either way; raw pools are opt-in.
      out.draws.clear();
      out.draws_limit.clear();
    }
    result.per_s.push_back(std::move(out));
  }
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

ExperimentResult run_detection(const ExperimentPlan& plan) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.plan = plan;
  const std::size_t n = plan.n;
  const std::size_t reps = plan.reps;
  const MixtureParams mix(n, plan.beta, plan.r);
  const auto alt = AlternativeCdf::mixture(mix.epsilon(), mix.mu());
  const double nn = static_cast<double>(n);
  // Slowly-decreasing-level calibration: reject when n S_n^+(s) >= log log n.
  const double threshold = std::log(std::log(nn));
  const double r_n = centering(nn).r_n;

  for (const double s_value : plan.s_list) {
    const DivergenceOrder s(s_value);
    std::vector<std::uint8_t> rej0(reps), rej1(reps);
    std::vector<double> c0(reps), c1(reps), p0(reps), p1(reps);
    parallel_chunks(
        reps, plan.threads, [&](std::size_t begin, std::size_t end) {
          for (std::size_t rep = begin; rep < end; ++rep) {
            auto rng0 = rep_rng(plan.seed, rep, kStreamData);
            const Sample h0 = uniform_sample(rng0, n);
            auto rng1 = rep_rng(plan.seed, rep, kStreamAlt);
            const Sample h1 = alt.sample(rng1, n);
            p0[rep] = nn * sn_plus(s, h0, plan.x_cap).value;
            p1[rep] = nn * sn_plus(s, h1, plan.x_cap).value;
            rej0[rep] = p0[rep] >= threshold;
            rej1[rep] = p1[rep] >= threshold;
            c0[rep] = nn * sn(s, h0).value - r_n;
            c1[rep] = nn * sn(s, h1).value - r_n;
          }
        });
    PerOrderSummary out;
    out.s = s_value;
    out.threshold = threshold;
    out.size = rate_of(rej0);
    out.power = rate_of(rej1);
    out.h0_mean_centered = finite_mean(c0);
    out.h1_mean_centered = finite_mean(c1);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto* v : {&c0, &c1}) {
      for (const double x : *v) {
        if (!std::isfinite(x)) continue;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    }
    out.h0_centered_hist = make_histogram(c0, lo, hi, plan.histogram_bins);
    out.h1_centered_hist = make_histogram(c1, lo, hi, plan.histogram_bins);
    if (plan.keep_draws) {
      out.draws = std::move(p0);
      out.draws_alt = std::move(p1);
    }
    result.per_s.push_back(std::move(out));
  }
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

ExperimentResult run_experiment(const ExperimentPlan& plan,
                                QuantileCache* cache) {
  switch (plan.kind) {
    case ExperimentPlan::Kind::NullCalibration:
      return run_null_calibration(plan, cache);
    case ExperimentPlan::Kind::BandCoverage:
      return run_band_coverage(plan, cache);
    case ExperimentPlan::Kind::PoissonBoundary:
      return run_poisson_boundary(plan);
    case ExperimentPlan::Kind::Detection:
    default:
      return run_detection(plan);
  }
}

namespace {

const char* kind_name(ExperimentPlan::Kind k) {
  switch (k) {
    case ExperimentPlan::Kind::NullCalibration:
      return "null-calibration";
    case ExperimentPlan::Kind::BandCoverage:
      return "band-coverage";
    case ExperimentPlan::Kind::PoissonBoundary:
      return "poisson-boundary";
    case ExperimentPlan::Kind::Detection:
    default:
      return "detection";
  }
}

nlohmann::json rate_json(const RateWithSE& r) {
  return {{"rate", r.rate}, {"se", r.se}};
}

}  // namespace

std::string ExperimentResult::to_json() const {
  nlohmann::json j;
  j["plan"] = {
      {"kind", kind_name(plan.kind)},
      {"n", plan.n},
      {"s", plan.s_list},
      {"reps", plan.reps},
      {"alpha", plan.alpha},
      {"beta", plan.beta},
      {"r", plan.r},
      {"seed", plan.seed},
      {"method",
       plan.method == ExperimentPlan::Method::Exact ? "exact" : "asymptotic"},
  };
  j["runtime_seconds"] = runtime_seconds;
  j["per_s"] = nlohmann::json::array();
  for (const auto& p : per_s) {
    nlohmann::json e;
    e["s"] = p.s;
    switch (plan.kind) {
      case ExperimentPlan::Kind::NullCalibration:
        e["critical_exact"] = p.critical_exact;
        e["critical_asymptotic"] = p.critical_asymptotic;
        e["reject_exact"] = rate_json(p.reject_exact);
        e["reject_asymptotic"] = rate_json(p.reject_asymptotic);
        e["mean_n_tn"] = p.mean_ntn;
        break;
      case ExperimentPlan::Kind::BandCoverage:
        e["coverage"] = rate_json(p.coverage);
        break;
      case ExperimentPlan::Kind::PoissonBoundary:
        e["ks_vs_limit"] = p.ks_vs_limit;
        break;
      case ExperimentPlan::Kind::Detection:
        e["threshold"] = p.threshold;
        e["size"] = rate_json(p.size);
        e["power"] = rate_json(p.power);
        e["h0_mean_centered"] = p.h0_mean_centered;
        e["h1_mean_centered"] = p.h1_mean_centered;
        break;
    }
    if (!p.draws.empty()) e["draws"] = p.draws;
    if (!p.draws_alt.empty()) e["draws_alt"] = p.draws_alt;
    if (!p.draws_limit.empty()) e["draws_limit"] = p.draws_limit;
    j["per_s"].push_back(std::move(e));
  }
  return j.dump(2);
}

void ExperimentResult::write_histograms_csv(std::ostream& out) const {
  out << "s,hypothesis,bin_left,bin_right,count\n";
  for (const auto& p : per_s) {
    for (const auto& b : p.h0_centered_hist)
      out << p.s << ",H0," << b.left << "," << b.right << "," << b.count
          << "\n";
    for (const auto& b : p.h1_centered_hist)
      out << p.s << ",H1," << b.left << "," << b.right << "," << b.count
          << "\n";
  }
}

}  // namespace phidiv
