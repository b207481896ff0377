// Command-line front end: statistics, p-values, quantiles, confidence
// bands, and the Monte Carlo experiment driver.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phidiv/asymptotic_null.hpp"
#include "phidiv/bands.hpp"
#include "phidiv/exact_null.hpp"
#include "phidiv/montecarlo.hpp"
#include "phidiv/normal.hpp"
#include "phidiv/statistics.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::size_t kExactLimit = 3000;

using nlohmann::json;
using namespace phidiv;

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> read_values(const std::string& path) {
  std::istream* in = &std::cin;
  std::ifstream file;
  if (path != "-") {
    file.open(path);
    if (!file) throw DataError("cannot open input file: " + path);
    in = &file;
  }
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(*in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::string token;
    while (row >> token) {
      char* endp = nullptr;
      const double v = std::strtod(token.c_str(), &endp);
      if (endp == token.c_str() || *endp != '\0' || !std::isfinite(v))
        throw DataError("non-numeric input at line " +
                        std::to_string(line_no) + ": '" + token + "'");
      values.push_back(v);
    }
  }
  if (values.empty()) throw DataError("no data values in input");
  return values;
}

// Null-transform spec: uniform | normal:MU,SIGMA | exponential:RATE |
// grid:FILE (CSV rows y,F0(y), nondecreasing).
struct NullTransform {
  std::function<double(double)> f0 = [](double y) { return y; };
  std::string name = "uniform";
};

NullTransform parse_null_spec(const std::string& spec) {
  NullTransform t;
  t.name = spec;
  if (spec.empty() || spec == "uniform") {
    t.name = "uniform";
    return t;
  }
  const auto colon = spec.find(':');
  const std::string family = spec.substr(0, colon);
  const std::string args =
      colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (family == "normal") {
    double mu = 0.0, sigma = 1.0;
    if (!args.empty() &&
        std::sscanf(args.c_str(), "%lf,%lf", &mu, &sigma) < 1)
      throw CLI::ValidationError("--null normal expects normal:MU,SIGMA");
    if (!(sigma > 0.0))
      throw CLI::ValidationError("--null normal: sigma must be > 0");
    t.f0 = [mu, sigma](double y) { return norm_cdf((y - mu) / sigma); };
  } else if (family == "exponential") {
    double rate = 1.0;
    if (!args.empty() && std::sscanf(args.c_str(), "%lf", &rate) != 1)
      throw CLI::ValidationError("--null exponential expects exponential:RATE");
    if (!(rate > 0.0))
      throw CLI::ValidationError("--null exponential: rate must be > 0");
    t.f0 = [rate](double y) { return -std::expm1(-rate * y); };
  } else if (family == "grid") {
    std::ifstream in(args);
    if (!in) throw DataError("cannot open null grid file: " + args);
    auto ys = std::make_shared<std::vector<double>>();
    auto fs = std::make_shared<std::vector<double>>();
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      double y, f;
      if (!(row >> y >> f)) throw DataError("bad null grid row: " + line);
      if (!ys->empty() && (y < ys->back() || f < fs->back()))
        throw DataError("null grid must be nondecreasing");
      ys->push_back(y);
      fs->push_back(f);
    }
    if (ys->size() < 2) throw DataError("null grid needs >= 2 rows");
    t.f0 = [ys, fs](double y) {
      if (y <= ys->front()) return fs->front();
      if (y >= ys->back()) return fs->back();
      const auto it = std::upper_bound(ys->begin(), ys->end(), y);
      const std::size_t i = static_cast<std::size_t>(it - ys->begin());
      const double y0 = (*ys)[i - 1], y1 = (*ys)[i];
      const double f0 = (*fs)[i - 1], f1 = (*fs)[i];
      return y1 == y0 ? f1 : f0 + (f1 - f0) * (y - y0) / (y1 - y0);
    };
  } else {
    throw CLI::ValidationError("unknown --null spec: " + spec);
  }
  return t;
}

Sample load_sample(const std::string& path, const NullTransform& t,
                   std::vector<std::string>& warnings) {
  auto values = read_values(path);
  for (auto& v : values) v = t.f0(v);
  for (const double v : values) {
    if (!(v > 0.0 && v < 1.0))
      throw DataError(
          "transformed value " + std::to_string(v) +
          " outside (0,1); check the --null specification");
  }
  Sample sample(std::move(values));
  if (sample.has_ties())
    warnings.push_back(
        "input contains exact ties; a continuous null makes these "
        "probability zero");
  return sample;
}

std::optional<std::string> cache_dir() {
  const char* dir = std::getenv("PHIDIV_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return std::string(dir);
}

void emit(const json& j, bool csv) {
  if (!csv) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  for (const auto& [key, value] : j.items()) {
    if (value.is_primitive()) {
      std::cout << key << "," << value.dump() << "\n";
    } else {
      std::cout << key << "," << value.dump() << "\n";
    }
  }
}

json base_report(const std::string& command, const json& config,
                 const std::vector<std::string>& warnings) {
  json j;
  j["tool"] = "phidiv";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = config;
  if (!warnings.empty()) j["warnings"] = warnings;
  return j;
}

StatKind parse_kind(const std::string& kind) {
  if (kind == "sup") return StatKind::SupTwoSided;
  if (kind == "sup-plus") return StatKind::SupPlus;
  if (kind == "integral") return StatKind::Integral;
  if (kind == "hc-star") return StatKind::HcStar;
  if (kind == "ur") return StatKind::SupUnrestricted;
  if (kind == "ur-plus") return StatKind::SupUrPlus;
  if (kind == "ur-minus") return StatKind::SupUrMinus;
  throw CLI::ValidationError("unknown --kind: " + kind);
}

double compute_stat(StatKind kind, DivergenceOrder s, const Sample& sample,
                    double x_cap, double alpha0) {
  switch (kind) {
    case StatKind::SupTwoSided:
      return sn(s, sample).value;
    case StatKind::SupPlus:
      return sn_plus(s, sample, x_cap).value;
    case StatKind::Integral:
      return tn(s, sample).value;
    case StatKind::HcStar:
      return hc_star(sample, alpha0).value;
    case StatKind::SupUnrestricted:
      return sn_unrestricted(s, sample).value;
    case StatKind::SupUrPlus:
      return sn_ur_plus(s, sample).value;
    case StatKind::SupUrMinus:
    default:
      return sn_ur_minus(s, sample).value;
  }
}

int run(int argc, char** argv) {
  CLI::App app{"phi-divergence goodness-of-fit statistics"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // Shared options.
  std::string input = "-", null_spec = "uniform", kind_name = "sup";
  std::string method = "auto", plan_path, out_dir;
  double s_value = 1.0, alpha = 0.05, x_cap = 0.5, alpha0 = 0.5,
         lambda = 0.0;
  std::size_t n = 0, ad_draws = 1000000, threads = 0;
  std::uint64_t seed = 1;
  bool csv = false;

  auto* stat = app.add_subcommand("stat", "compute a statistic from data");
  stat->add_option("--input,-i", input, "data file ('-' for stdin)");
  stat->add_option("--s", s_value, "divergence order")->required();
  stat->add_option("--kind", kind_name,
                   "sup|sup-plus|integral|hc-star|ur|ur-plus|ur-minus");
  stat->add_option("--x-cap", x_cap, "upper limit for sup-plus");
  stat->add_option("--alpha0", alpha0, "range fraction for hc-star");
  stat->add_option("--null", null_spec, "null transform spec");
  stat->add_flag("--csv", csv, "CSV output");

  auto* pvalue = app.add_subcommand("pvalue", "statistic with a p-value");
  pvalue->add_option("--input,-i", input, "data file ('-' for stdin)");
  pvalue->add_option("--s", s_value, "divergence order")->required();
  pvalue->add_option("--kind", kind_name, "sup|integral");
  pvalue->add_option("--method", method, "exact|asymptotic|auto");
  pvalue->add_option("--null", null_spec, "null transform spec");
  pvalue->add_option("--seed", seed, "seed for the integral-limit cache");
  pvalue->add_option("--ad-draws", ad_draws,
                     "draw count for the integral-limit cache");
  pvalue->add_flag("--csv", csv, "CSV output");

  auto* quant = app.add_subcommand("quantile", "null quantile q_n(s, alpha)");
  quant->add_option("--n", n, "sample size")->required();
  quant->add_option("--s", s_value, "divergence order")->required();
  quant->add_option("--alpha", alpha, "upper tail probability")->required();
  quant->add_option("--method", method, "exact|asymptotic|auto");
  quant->add_flag("--csv", csv, "CSV output");

  auto* band_cmd = app.add_subcommand("band", "confidence band for F");
  band_cmd->add_option("--input,-i", input, "data file ('-' for stdin)");
  band_cmd->add_option("--s", s_value, "divergence order")->required();
  band_cmd->add_option("--alpha", alpha, "1 - coverage")->required();
  band_cmd->add_option("--method", method, "exact|asymptotic|auto");
  band_cmd->add_option("--null", null_spec, "null transform spec");
  band_cmd->add_flag("--csv", csv, "CSV band rows instead of JSON");

  auto* sim = app.add_subcommand("simulate", "run an experiment plan");
  sim->add_option("--plan", plan_path, "plan JSON file")->required();
  sim->add_option("--out", out_dir, "output directory (default stdout)");
  sim->add_option("--threads", threads, "worker threads (0 = auto)");
  sim->add_option("--lambda", lambda, "unused placeholder")->group("");

  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> warnings;
  QuantileCache qcache;
  const auto cdir = cache_dir();
  const std::string qcache_path =
      cdir ? *cdir + "/quantiles.csv" : std::string{};
  if (cdir) qcache = QuantileCache::load(qcache_path);
  const auto persist_qcache = [&] {
    if (cdir) qcache.save(qcache_path);
  };

  if (*stat) {
    const auto t = parse_null_spec(null_spec);
    const Sample sample = load_sample(input, t, warnings);
    const DivergenceOrder s(s_value);
    const StatKind kind = parse_kind(kind_name);
    if ((s_value < -1.0 || s_value > 2.0) && kind != StatKind::HcStar)
      warnings.push_back(
          "s outside [-1,2]: statistics are computable but no null "
          "critical values are available");
    const double value = compute_stat(kind, s, sample, x_cap, alpha0);
    json config{{"input", input},   {"s", s_value},
                {"kind", kind_name}, {"null", t.name},
                {"x_cap", x_cap},    {"alpha0", alpha0}};
    json j = base_report("stat", config, warnings);
    j["n"] = sample.size();
    j["statistic"] = value;
    j["n_times_statistic"] = static_cast<double>(sample.size()) * value;
    emit(j, csv);
    return 0;
  }

  if (*pvalue) {
    const auto t = parse_null_spec(null_spec);
    const Sample sample = load_sample(input, t, warnings);
    const DivergenceOrder s(s_value);
    const std::size_t nn = sample.size();
    json config{{"input", input}, {"s", s_value},     {"kind", kind_name},
                {"null", t.name}, {"method", method}, {"seed", seed}};
    json j = base_report("pvalue", config, warnings);
    j["n"] = nn;
    if (kind_name == "integral") {
      const double value = tn(s, sample).value;
      AdLimitCache cache;
      const std::string cpath = cdir ? *cdir + "/ad2_draws.csv" : "";
      if (cdir) cache = AdLimitCache::load(cpath);
      if (cache.empty() || cache.size() < ad_draws) {
        cache = AdLimitCache::build(ad_draws, seed, 10000, threads);
        if (cdir) cache.save(cpath);
      }
      const auto mc = tn_pvalue_asymptotic(nn, s, value, cache);
      j["statistic"] = value;
      j["n_times_statistic"] = static_cast<double>(nn) * value;
      j["pvalue"] = {{"value", mc.p},
                     {"se", mc.se},
                     {"method", "monte-carlo-limit"},
                     {"draws", cache.size()},
                     {"cache_seed", cache.seed()},
                     {"truncation", cache.truncation()}};
      emit(j, csv);
      return 0;
    }
    const double value = sn(s, sample).value;
    j["statistic"] = value;
    j["n_times_statistic"] = static_cast<double>(nn) * value;
    std::string chosen = method;
    if (method == "auto") chosen = nn <= kExactLimit ? "exact" : "asymptotic";
    if (chosen == "exact" && nn > kExactLimit) {
      throw CLI::ValidationError(
          "n exceeds the exact-null limit (3000); pass --method asymptotic");
    }
    if (chosen == "asymptotic" && method == "auto" && nn > kExactLimit)
      warnings.push_back(
          "n exceeds the exact-null limit; falling back to the asymptotic "
          "p-value");
    double p;
    if (chosen == "exact") {
      p = 1.0 - cdf_exact(nn, s, std::max(value, 1e-300));
    } else {
      p = pvalue_asymptotic(nn, s, value);
    }
    j["config"]["method"] = chosen;
    if (!warnings.empty()) j["warnings"] = warnings;
    j["pvalue"] = {{"value", p}, {"method", chosen}};
    emit(j, csv);
    persist_qcache();
    return 0;
  }

  if (*quant) {
    if (n == 0) throw CLI::ValidationError("--n must be >= 1");
    const DivergenceOrder s(s_value);
    std::string chosen = method;
    if (method == "auto") chosen = n <= kExactLimit ? "exact" : "asymptotic";
    if (chosen == "exact" && n > kExactLimit)
      throw CLI::ValidationError(
          "n exceeds the exact-null limit (3000); pass --method asymptotic");
    const double q = chosen == "exact"
                         ? qcache.quantile(n, s, alpha)
                         : quantile_asymptotic(n, s, alpha);
    json config{
        {"n", n}, {"s", s_value}, {"alpha", alpha}, {"method", chosen}};
    json j = base_report("quantile", config, warnings);
    j["quantile"] = q;
    emit(j, csv);
    persist_qcache();
    return 0;
  }

  if (*band_cmd) {
    const auto t = parse_null_spec(null_spec);
    const Sample sample = load_sample(input, t, warnings);
    const DivergenceOrder s(s_value);
    std::string chosen = method;
    if (method == "auto")
      chosen = sample.size() <= kExactLimit ? "exact" : "asymptotic";
    const BandMethod bm =
        chosen == "exact" ? BandMethod::Exact : BandMethod::Asymptotic;
    const StepBand b = band(sample, s, alpha, bm, &qcache);
    persist_qcache();
    if (csv) {
      write_band_csv(b, std::cout);
    } else {
      json config{{"input", input},
                  {"s", s_value},
                  {"alpha", alpha},
                  {"method", chosen},
                  {"null", t.name}};
      json j = base_report("band", config, warnings);
      j["band"] = json::parse(band_to_json(b));
      std::cout << j.dump(2) << "\n";
    }
    return 0;
  }

  if (*sim) {
    std::ifstream in(plan_path);
    if (!in) throw DataError("cannot open plan file: " + plan_path);
    json pj = json::parse(in);
    ExperimentPlan plan;
    const std::string kind = pj.value("kind", "null-calibration");
    if (kind == "null-calibration")
      plan.kind = ExperimentPlan::Kind::NullCalibration;
    else if (kind == "band-coverage")
      plan.kind = ExperimentPlan::Kind::BandCoverage;
    else if (kind == "poisson-boundary")
      plan.kind = ExperimentPlan::Kind::PoissonBoundary;
    else if (kind == "detection")
      plan.kind = ExperimentPlan::Kind::Detection;
    else
      throw DataError("unknown plan kind: " + kind);
    plan.n = pj.value("n", 100);
    if (pj.contains("s")) {
      if (pj["s"].is_array())
        plan.s_list = pj["s"].get<std::vector<double>>();
      else
        plan.s_list = {pj["s"].get<double>()};
    }
    plan.reps = pj.value("reps", 1000);
    plan.alpha = pj.value("alpha", 0.05);
    plan.beta = pj.value("beta", 0.75);
    plan.r = pj.value("r", 0.15);
    plan.x_cap = pj.value("x_cap", 0.5);
    plan.seed = pj.value("seed", 1);
    plan.keep_draws = pj.value("keep_draws", false);
    plan.histogram_bins = pj.value("histogram_bins", 60);
    plan.method = pj.value("method", "exact") == std::string("asymptotic")
                      ? ExperimentPlan::Method::Asymptotic
                      : ExperimentPlan::Method::Exact;
    plan.threads = threads > 0 ? threads : pj.value("threads", 0);

    const ExperimentResult result = run_experiment(plan, &qcache);
    persist_qcache();
    if (out_dir.empty()) {
      std::cout << result.to_json() << "\n";
    } else {
      std::ofstream rj(out_dir + "/result.json");
      if (!rj) throw DataError("cannot write to " + out_dir);
      rj << result.to_json() << "\n";
      if (plan.kind == ExperimentPlan::Kind::Detection) {
        std::ofstream hist(out_dir + "/histograms.csv");
        result.write_histograms_csv(hist);
      }
      std::cout << "wrote " << out_dir << "/result.json\n";
    }
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}
