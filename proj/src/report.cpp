#include "hypwalk/report.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hypwalk/boundary_rep.hpp"
#include "hypwalk/equidist.hpp"
#include "hypwalk/measures.hpp"
#include "hypwalk/parallel.hpp"
#include "hypwalk/walk_engine.hpp"

namespace hypwalk {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// One metric per row; every row carries the experiment id, seed, parameter
// echo, and an exact|mc tag (stderr empty for exact values).
class CsvReport {
 public:
  CsvReport(const RunConfig& cfg, const std::string& path) : cfg_(cfg), out_(path) {
    out_ << "experiment,seed,params,metric,value,stderr,kind\n";
  }
  void exact(const std::string& metric, const std::string& value) {
    row(metric, value, "", "exact");
  }
  void exact(const std::string& metric, const Rational& value) {
    row(metric, to_string(value), "", "exact");
  }
  void mc(const std::string& metric, double value, double stderr_) {
    row(metric, fmt_double(value), fmt_double(stderr_), "mc");
  }

 private:
  void row(const std::string& metric, const std::string& value, const std::string& se,
           const std::string& kind) {
    out_ << cfg_.experiment << ',' << cfg_.seed << ',' << '"' << cfg_.params.dump() << '"' << ','
         << metric << ',' << value << ',' << se << ',' << kind << '\n';
  }
  const RunConfig& cfg_;
  std::ofstream out_;
};

WalkMeasure measure_from_config(const RunConfig& cfg) {
  if (cfg.measure_weights.empty()) return WalkMeasure::simple_random_walk(cfg.rank);
  std::vector<std::pair<ReducedWord, Rational>> ws;
  ws.reserve(cfg.measure_weights.size());
  for (const auto& [word, weight] : cfg.measure_weights)
    ws.emplace_back(parse_word(word, cfg.rank), parse_rational(weight));
  return make_measure(cfg.rank, std::move(ws));
}

long long param(const RunConfig& cfg, const char* key, long long fallback) {
  auto it = cfg.params.find(key);
  return it == cfg.params.end() ? fallback : it->get<long long>();
}

std::string quad_str(const QuadExt& v) {
  return to_string(v.rat) + (v.irr == 0 ? "" : "+" + to_string(v.irr) + "*sqrt" +
                                                    std::to_string(v.rad));
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"drift", "rho",      "green", "harmonic",
                                              "equidist", "hc", "pn",    "acceptance"};
  return names;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig cfg;
  if (j.contains("experiment")) cfg.experiment = j.at("experiment").get<std::string>();
  if (j.contains("rank")) cfg.rank = j.at("rank").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  if (j.contains("measure")) {
    for (auto it = j.at("measure").begin(); it != j.at("measure").end(); ++it)
      cfg.measure_weights.emplace_back(it.key(), it.value().get<std::string>());
  }
  if (j.contains("params")) cfg.params = j.at("params");
  return cfg;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["rank"] = rank;
  j["seed"] = seed;
  j["out"] = out_dir;
  j["threads"] = threads;
  nlohmann::json m = nlohmann::json::object();
  for (const auto& [w, wt] : measure_weights) m[w] = wt;
  j["measure"] = m;
  j["params"] = params;
  return j;
}

void RunConfig::validate() const {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), experiment) == names.end())
    throw Error(Errc::config_invalid, "experiment: unknown value '" + experiment + "'");
  if (rank < 2 || rank > 26)
    throw Error(Errc::config_invalid, "rank: must be in [2, 26], got " + std::to_string(rank));
  if (threads < 1 || threads > 256)
    throw Error(Errc::config_invalid, "threads: must be in [1, 256]");
  if (out_dir.empty()) throw Error(Errc::config_invalid, "out: must be nonempty");
  if (!params.is_object()) throw Error(Errc::config_invalid, "params: must be an object");
}

namespace {

void run_drift(const RunConfig& cfg, CsvReport& csv, nlohmann::json& summary) {
  auto mu = measure_from_config(cfg);
  int n = static_cast<int>(param(cfg, "n", 1000));
  long long paths = param(cfg, "paths", 10000);
  auto est = drift_estimate(mu, n, paths, Seed{cfg.seed});
  csv.mc("drift", est.value, est.stderr_);
  summary["drift"] = est.value;
  summary["stderr"] = est.stderr_;
  summary["oracle_uniform_walk"] = (cfg.rank - 1.0) / cfg.rank;
}

void run_rho(const RunConfig& cfg, CsvReport& csv, nlohmann::json& summary) {
  auto mu = measure_from_config(cfg);
  int n_max = static_cast<int>(param(cfg, "n_max", 24));
  auto rep = spectral_radius_estimate(mu, n_max);
  for (size_t i = 0; i < rep.log_return_probs.size(); ++i)
    csv.exact("log_return_prob_2n_" + std::to_string(2 * (i + 1)),
              fmt_double(rep.log_return_probs[i]));
  csv.exact("rho_fit", fmt_double(rep.rho_fit));
  csv.exact("rho_crude", fmt_double(rep.rho_crude));
  summary["rho_fit"] = rep.rho_fit;
  summary["rho_crude"] = rep.rho_crude;
  summary["crude_monotone"] = rep.crude_monotone;
  summary["rejected_elementary"] = rep.rejected_elementary;
  summary["kesten_uniform_walk"] = std::sqrt(2.0 * cfg.rank - 1.0) / cfg.rank;
}

void run_green(const RunConfig& cfg, CsvReport& csv, nlohmann::json& summary) {
  auto mu = measure_from_config(cfg);
  int max_len = static_cast<int>(param(cfg, "max_len", 6));
  long long trials = param(cfg, "trials", 200000);
  int horizon = static_cast<int>(param(cfg, "horizon", 30));
  auto fit = green_metric_fit(mu, max_len, trials, Seed{cfg.seed}, horizon);
  for (int l = 1; l <= max_len; ++l)
    csv.mc("green_distance_len_" + std::to_string(l), fit.distances[static_cast<size_t>(l - 1)],
           fit.stderrs[static_cast<size_t>(l - 1)]);
  csv.mc("slope", fit.slope, fit.slope_se);
  csv.mc("intercept", fit.intercept, fit.intercept_se);
  summary["slope"] = fit.slope;
  summary["slope_se"] = fit.slope_se;
  summary["intercept"] = fit.intercept;
  summary["log_q"] = std::log(2.0 * cfg.rank - 1.0);
}

void run_harmonic(const RunConfig& cfg, CsvReport& csv, nlohmann::json& summary) {
  auto mu = measure_from_config(cfg);
  int depth = static_cast<int>(param(cfg, "depth", 3));
  long long samples = param(cfg, "samples", 100000);
  auto est = empirical_harmonic_measure(mu, depth, samples, Seed{cfg.seed});
  auto exact = exact_markov_measure(cfg.rank, depth);
  double tv = 0;
  for_each_cylinder(cfg.rank, depth, [&](const ReducedWord& w, long long idx) {
    csv.mc("mass_" + format_word(w), est.table.mass[static_cast<size_t>(idx)],
           est.table.stderrs[static_cast<size_t>(idx)]);
    tv += std::fabs(est.table.mass[static_cast<size_t>(idx)] -
                    to_double(exact.mass[static_cast<size_t>(idx)]));
  });
  tv /= 2;
  csv.mc("tv_to_exact", tv, 0.0);
  Rational resid = stationarity_residual(exact, mu.is_uniform_generator_walk()
                                                    ? mu
                                                    : WalkMeasure::simple_random_walk(cfg.rank));
  csv.exact("exact_table_stationarity_residual", resid);
  double emp_resid = stationarity_residual(est.table, mu);
  csv.mc("empirical_stationarity_residual", emp_resid, 0.0);
  summary["tv_to_exact"] = tv;
  summary["nonconverged"] = est.table.nonconverged;
  summary["backtrack_bias_bound"] = est.backtrack_bias_bound;
  summary["exact_residual_is_zero"] = resid == 0;
}

void run_equidist(const RunConfig& cfg, CsvReport& csv, nlohmann::json& summary) {
  auto mu = measure_from_config(cfg);
  long long samples = param(cfg, "samples", 200000);
  std::vector<int> ns;
  if (cfg.params.contains("n_list"))
    for (const auto& v : cfg.params.at("n_list")) ns.push_back(v.get<int>());
  else
    ns = {10, 30, 100};
  auto phi = StepFnD::indicator(cfg.rank, parse_word(cfg.params.value("phi", "a"), cfg.rank));
  auto psi = StepFnD::indicator(cfg.rank, parse_word(cfg.params.value("psi", "b"), cfg.rank));
  auto xi = BoundaryPoint::parse(cfg.params.value("xi", "1|a"), cfg.rank);
  auto eta = BoundaryPoint::parse(cfg.params.value("eta", "1|a"), cfg.rank);
  MarkovMeasure nu{cfg.rank};
  double limit = to_double(nu.cylinder_mass(parse_word(cfg.params.value("phi", "a"), cfg.rank))) *
                 to_double(nu.cylinder_mass(parse_word(cfg.params.value("psi", "b"), cfg.rank)));
  auto rows = equidist_curve(mu, ns, phi, psi, xi, eta, samples, Seed{cfg.seed});
  for (const auto& row : rows) {
    csv.mc("estimate_n_" + std::to_string(row.n), row.estimate, row.stderr_);
    csv.mc("gap_n_" + std::to_string(row.n), std::fabs(row.estimate - limit), row.stderr_);
  }
  summary["limit_product"] = limit;
  summary["final_estimate"] = rows.back().estimate;
}

void run_hc(const RunConfig& cfg, CsvReport& csv, nlohmann::json& summary) {
  int radius = static_cast<int>(param(cfg, "radius", 20));
  for (int l = 0; l <= radius; ++l) {
    auto xi = harish_chandra_length(cfg.rank, l);
    csv.exact("xi_len_" + std::to_string(l), quad_str(xi));
  }
  auto band = harish_chandra_asymptotics(cfg.rank, radius);
  csv.exact("envelope_c_low", fmt_double(band.c_low));
  csv.exact("envelope_c_high", fmt_double(band.c_high));
  summary["c_low"] = band.c_low;
  summary["c_high"] = band.c_high;
  summary["band_factor"] = band.c_high / band.c_low;
  summary["monotone_decreasing"] = band.decreasing;
}

void run_pn(const RunConfig& cfg, CsvReport& csv, nlohmann::json& summary) {
  auto mu = measure_from_config(cfg);
  int n_exact = static_cast<int>(param(cfg, "n_exact", 8));
  int n_mc = static_cast<int>(param(cfg, "n_mc", 50));
  long long budget = param(cfg, "budget", 20000);
  auto phi = StepFnX::indicator(cfg.rank, parse_word(cfg.params.value("phi", "a"), cfg.rank));
  QuadExt mean = integral(phi);
  for (auto& v : phi.values) v = v - mean;
  StepFnD phid;
  phid.rank = cfg.rank;
  phid.depth = phi.depth;
  for (const auto& v : phi.values) phid.values.push_back(v.value());
  for (int n = 0; n <= n_exact; n += 2) {
    auto coef = pn_coefficient_exact(mu, n, phi, phi);
    csv.exact("coef_exact_n_" + std::to_string(n), quad_str(coef));
  }
  auto mc = pn_coefficient_mc(mu, n_mc, phid, phid, budget, Seed{cfg.seed});
  csv.mc("coef_mc_n_" + std::to_string(n_mc), mc.value, mc.stderr_);
  auto sup = pn_one_sup_exact(mu, std::min(n_exact, 8));
  csv.exact("one_sup_exact_n_" + std::to_string(std::min(n_exact, 8)), sup);
  auto supmc = pn_one_sup_mc(mu, n_mc, budget / 4, 2, Seed{cfg.seed + 1});
  csv.mc("one_sup_mc_n_" + std::to_string(n_mc), supmc.value, supmc.max_stderr);
  summary["coef_mc"] = mc.value;
  summary["one_sup_exact"] = to_double(sup);
  summary["one_sup_mc"] = supmc.value;
}

}  // namespace

ExperimentOutput run_experiment(const RunConfig& cfg) {
  cfg.validate();
  set_threads(cfg.threads);
  std::filesystem::create_directories(cfg.out_dir);
  ExperimentOutput out;
  out.csv_path = cfg.out_dir + "/" + cfg.experiment + ".csv";
  out.summary_path = cfg.out_dir + "/" + cfg.experiment + "_summary.json";

  nlohmann::json summary;
  summary["config"] = cfg.to_json();
  {
    CsvReport csv(cfg, out.csv_path);
    if (cfg.experiment == "drift") {
      run_drift(cfg, csv, summary);
    } else if (cfg.experiment == "rho") {
      run_rho(cfg, csv, summary);
    } else if (cfg.experiment == "green") {
      run_green(cfg, csv, summary);
    } else if (cfg.experiment == "harmonic") {
      run_harmonic(cfg, csv, summary);
    } else if (cfg.experiment == "equidist") {
      run_equidist(cfg, csv, summary);
    } else if (cfg.experiment == "hc") {
      run_hc(cfg, csv, summary);
    } else if (cfg.experiment == "pn") {
      run_pn(cfg, csv, summary);
    } else if (cfg.experiment == "acceptance") {
      auto results = run_acceptance(nullptr);
      bool all = true;
      for (const auto& r : results) {
        csv.exact("criterion_" + std::to_string(r.id) + "_" + r.name, r.pass ? "pass" : "FAIL");
        summary["criteria"][r.name] = r.pass;
        all = all && r.pass;
      }
      summary["all_pass"] = all;
    }
  }
  std::ofstream js(out.summary_path);
  js << summary.dump(2) << '\n';
  return out;
}

}  // namespace hypwalk
