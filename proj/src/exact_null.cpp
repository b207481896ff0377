#include "phidiv/exact_null.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

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

struct Breakpoint {
  double t;
  long long max_count = -1;  // from a's: count at t must be <= this
  long long min_count = -1;  // from b's: count at t must be >= this
};

// One binomial-increment convolution step: counts grow by
// Binomial(n - j, p) where p is the gap mass conditional on the remainder.
// Each source row is expanded from the pmf mode outward so that extreme
// rows (tiny leading pmf, significant mode) lose nothing to underflow.
class CountDistribution {
 public:
  explicit CountDistribution(std::size_t n)
      : n_(n), f_(n + 1, 0.0), scratch_(n + 1, 0.0), logfact_(n + 2, 0.0) {
    f_[0] = 1.0;
    for (std::size_t k = 1; k <= n + 1; ++k)
      logfact_[k] = logfact_[k - 1] + std::log(static_cast<double>(k));
  }

  void advance(double p) {
    if (!(p > 0.0)) return;
    std::fill(scratch_.begin() + static_cast<long>(jlo_),
              scratch_.begin() + static_cast<long>(n_) + 1, 0.0);
    std::size_t new_hi = jlo_;
    if (p >= 1.0) {
      double total = 0.0;
      for (std::size_t j = jlo_; j <= jhi_; ++j) total += f_[j];
      scratch_[n_] = total;
      jlo_ = new_hi = n_;
    } else {
      const double lp = std::log(p);
      const double lq = std::log1p(-p);
      const double odds = p / (1.0 - p);
      for (std::size_t j = jlo_; j <= jhi_; ++j) {
        const double w = f_[j];
        if (w == 0.0) continue;
        const std::size_t m = n_ - j;
        std::size_t mode = static_cast<std::size_t>(
            std::min(static_cast<double>(m),
                     std::floor(static_cast<double>(m + 1) * p)));
        const double log_mode = logfact_[m] - logfact_[mode] -
                                logfact_[m - mode] +
                                static_cast<double>(mode) * lp +
                                static_cast<double>(m - mode) * lq;
        const double pm = std::exp(log_mode);
        const double cutoff = pm * 1e-20;
        double pmf = pm;
        std::size_t d = mode;
        while (true) {
          scratch_[j + d] += w * pmf;
          new_hi = std::max(new_hi, j + d);
          if (d == m) break;
          const double next = pmf * static_cast<double>(m - d) /
                              static_cast<double>(d + 1) * odds;
          if (next < cutoff) break;
          pmf = next;
          ++d;
        }
        pmf = pm;
        d = mode;
        while (d > 0) {
          const double next = pmf * static_cast<double>(d) /
                              (static_cast<double>(m - d + 1) * odds);
          if (next < cutoff) break;
          --d;
          pmf = next;
          scratch_[j + d] += w * pmf;
        }
      }
    }
    f_.swap(scratch_);
    jhi_ = new_hi;
    renormalize();
  }

  // Zero out states with count > cap.
  void apply_max(long long cap) {
    if (cap < 0) {
      jlo_ = 1;
      jhi_ = 0;
      return;
    }
    const auto c = static_cast<std::size_t>(cap);
    for (std::size_t j = std::max(jlo_, c + 1); j <= jhi_; ++j) f_[j] = 0.0;
    if (jhi_ > c) jhi_ = c;
  }

  // Zero out states with count < floor_count.
  void apply_min(long long floor_count) {
    if (floor_count <= 0) return;
    const auto c = static_cast<std::size_t>(floor_count);
    for (std::size_t j = jlo_; j < std::min(c, jhi_ + 1); ++j) f_[j] = 0.0;
    if (jlo_ < c) jlo_ = c;
  }

  bool dead() const { return jlo_ > jhi_; }

  double total_probability() const {
    double total = 0.0;
    if (!dead())
      for (std::size_t j = jlo_; j <= jhi_; ++j) total += f_[j];
    return std::ldexp(total, static_cast<int>(std::max(
                                 exp2_, static_cast<long long>(-2000))));
  }

 private:
  void renormalize() {
    double mx = 0.0;
    for (std::size_t j = jlo_; j <= jhi_; ++j) mx = std::max(mx, f_[j]);
    if (mx == 0.0) {
      jlo_ = 1;
      jhi_ = 0;
      return;
    }
    if (mx < 0x1p-512) {
      for (std::size_t j = jlo_; j <= jhi_; ++j) f_[j] = std::ldexp(f_[j], 512);
      exp2_ -= 512;
    }
  }

  std::size_t n_;
  std::size_t jlo_ = 0;
  std::size_t jhi_ = 0;
  long long exp2_ = 0;
  std::vector<double> f_;
  std::vector<double> scratch_;
  std::vector<double> logfact_;
};

}  // namespace

OrderStatBand band_constraints(std::size_t n, DivergenceOrder s,
                               double lambda) {
  if (n == 0) throw std::invalid_argument("band_constraints: n == 0");
  if (!(lambda > 0.0))
    throw std::domain_error("band_constraints: lambda <= 0");
  const double nn = static_cast<double>(n);
  const bool full_range = effective_s(s) >= 1.0;

  std::vector<Interval> inv(n + 1, Interval{0.0, 1.0});
  if (full_range) {
    for (std::size_t j = 0; j <= n; ++j)
      inv[j] = invert_in_v(s, static_cast<double>(j) / nn, lambda);
  } else if (n == 1) {
    // Empty restricted range; the statistic is the single-point value
    // K_s(1, X_(1)), decreasing in X_(1).
    inv[1] = invert_in_v(s, 1.0, lambda);
  } else {
    for (std::size_t j = 1; j <= n - 1; ++j)
      inv[j] = invert_in_v(s, static_cast<double>(j) / nn, lambda);
  }

  OrderStatBand band;
  band.lower.resize(n);
  band.upper.resize(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const bool have_a = full_range || i <= n - 1 || n == 1;
    const bool have_b = full_range || i >= 2;
    band.lower[i - 1] = have_a ? inv[i].lo : 0.0;
    band.upper[i - 1] = have_b ? inv[i - 1].hi : 1.0;
  }
  for (std::size_t i = 1; i < n; ++i)
    band.lower[i] = std::max(band.lower[i], band.lower[i - 1]);
  for (std::size_t i = n - 1; i-- > 0;)
    band.upper[i] = std::min(band.upper[i], band.upper[i + 1]);
  return band;
}

double noe_probability(const OrderStatBand& band) {
  const std::size_t n = band.size();
  if (n == 0 || band.upper.size() != n)
    throw std::invalid_argument("noe_probability: malformed band");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(band.lower[i] >= 0.0 && band.lower[i] <= 1.0) ||
        !(band.upper[i] >= 0.0 && band.upper[i] <= 1.0))
      throw std::invalid_argument("noe_probability: bounds outside [0,1]");
  }

  std::vector<Breakpoint> events;
  events.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<long long>(i + 1);
    if (band.lower[i] > 0.0)
      events.push_back({band.lower[i], idx - 1, -1});
    if (band.upper[i] < 1.0) events.push_back({band.upper[i], -1, idx});
  }
  if (events.empty()) return 1.0;
  std::sort(events.begin(), events.end(),
            [](const Breakpoint& x, const Breakpoint& y) { return x.t < y.t; });

  CountDistribution dist(n);
  double t_prev = 0.0;
  std::size_t k = 0;
  while (k < events.size()) {
    const double t = events[k].t;
    long long cap = -1, floor_count = -1;
    while (k < events.size() && events[k].t == t) {
      if (events[k].max_count >= 0)
        cap = cap < 0 ? events[k].max_count
                      : std::min(cap, events[k].max_count);
      if (events[k].min_count >= 0)
        floor_count = std::max(floor_count, events[k].min_count);
      ++k;
    }
    if (t > t_prev) {
      dist.advance(t_prev < 1.0 ? (t - t_prev) / (1.0 - t_prev) : 1.0);
      t_prev = t;
    }
    if (cap >= 0) dist.apply_max(cap);
    if (floor_count >= 0) dist.apply_min(floor_count);
    if (dist.dead()) return 0.0;
  }
  return std::clamp(dist.total_probability(), 0.0, 1.0);
}

double cdf_exact(std::size_t n, DivergenceOrder s, double lambda,
                 std::size_t n_max) {
  if (n < 1 || n > n_max)
    throw std::out_of_range("cdf_exact: n outside [1, n_max]");
  return noe_probability(band_constraints(n, s, lambda));
}

double quantile_exact(std::size_t n, DivergenceOrder s, double alpha,
                      std::size_t n_max) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::domain_error("quantile_exact: alpha outside (0,1)");
  const double target = 1.0 - alpha;
  double lo = 1e-8;
  double hi = 10.0 + std::log(static_cast<double>(n));
  while (cdf_exact(n, s, hi, n_max) < target) hi *= 2.0;
  while (cdf_exact(n, s, lo, n_max) >= target) lo *= 0.25;
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (cdf_exact(n, s, mid, n_max) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

QuantileCache QuantileCache::load(const std::string& path) {
  QuantileCache cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    std::size_t n = 0;
    double s = 0.0, alpha = 0.0, q = 0.0;
    if (row >> n >> s >> alpha >> q) cache.insert(n, s, alpha, q);
  }
  return cache;
}

void QuantileCache::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("QuantileCache: cannot write " + path);
  char buf[128];
  for (const auto& [key, q] : entries_) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n",
                  std::get<0>(key), std::get<1>(key), std::get<2>(key), q);
    out << buf;
  }
}

std::optional<double> QuantileCache::lookup(std::size_t n, double s,
                                            double alpha) const {
  const auto it = entries_.find({n, s, alpha});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void QuantileCache::insert(std::size_t n, double s, double alpha, double q) {
  entries_[{n, s, alpha}] = q;
}

double QuantileCache::quantile(std::size_t n, DivergenceOrder s, double alpha,
                               std::size_t n_max) {
  if (const auto hit = lookup(n, s.s(), alpha)) return *hit;
  const double q = quantile_exact(n, s, alpha, n_max);
  insert(n, s.s(), alpha, q);
  return q;
}

}  // namespace phidiv
