#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cogsense/cogsense.hpp"

namespace cogsense::cli {
namespace {

struct Common {
  std::string scenario_path;
  std::string preset = "table2";
  std::string out_path;
  std::uint64_t seed = 1;
  std::string timestamp;
  std::vector<double> gamma_p1_db;
  std::vector<double> gamma_p2_db;
  std::vector<double> gamma_s_db;
  std::vector<double> kappa;
};

struct Point {
  std::optional<double> gamma_p1_db, gamma_p2_db, gamma_s_db;
};

double ms(double milliseconds) { return milliseconds * 1e-3; }

std::string timestamp_for(const Common& c) {
  if (!c.timestamp.empty()) return c.timestamp;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0') {
    try {
      return iso8601_utc(std::stoll(epoch));
    } catch (const std::exception&) {
      throw DomainError("SOURCE_DATE_EPOCH must be an integer number of seconds");
    }
  }
  return now_iso8601_utc();
}

Scenario base_scenario(const Common& c) {
  Scenario s = c.scenario_path.empty() ? table2() : load_scenario_file(c.scenario_path);
  if (c.kappa.size() == 1) s.kappa = c.kappa.front();
  validate(s);
  return s;
}

/// Every combination of the SNR overrides (a single empty point if none given).
std::vector<Point> override_points(const Common& c) {
  auto axis = [](const std::vector<double>& v) {
    std::vector<std::optional<double>> out;
    if (v.empty()) out.emplace_back();
    for (const double x : v) out.emplace_back(x);
    return out;
  };
  std::vector<Point> out;
  for (const auto& p1 : axis(c.gamma_p1_db)) {
    for (const auto& p2 : axis(c.gamma_p2_db)) {
      for (const auto& gs : axis(c.gamma_s_db)) out.push_back({p1, p2, gs});
    }
  }
  return out;
}

Scenario apply(Scenario s, const Point& p) {
  if (p.gamma_p1_db) s = with_gamma_p1_db(s, *p.gamma_p1_db);
  if (p.gamma_p2_db) s = with_gamma_p2_db(s, *p.gamma_p2_db);
  if (p.gamma_s_db) s = with_gamma_s_db(s, *p.gamma_s_db);
  validate(s);
  return s;
}

Scenario single_scenario(const Common& c) {
  const std::vector<Point> points = override_points(c);
  if (points.size() != 1) throw DomainError("this subcommand takes at most one value per SNR override");
  if (c.kappa.size() > 1) throw DomainError("this subcommand takes a single --kappa");
  return apply(base_scenario(c), points.front());
}

ModelVariant parse_variant(const std::string& name) {
  if (name == "im") return ModelVariant::IdealModel;
  if (name == "em-ac") return ModelVariant::EstAvgConstraint;
  if (name == "em-oc") return ModelVariant::EstOutageConstraint;
  throw DomainError("unknown variant '" + name + "'");
}

std::vector<ModelVariant> parse_variants(const std::vector<std::string>& names, bool allow_ideal) {
  std::vector<ModelVariant> out;
  for (const std::string& n : names) {
    if (n == "all") {
      if (allow_ideal) out.push_back(ModelVariant::IdealModel);
      out.push_back(ModelVariant::EstAvgConstraint);
      out.push_back(ModelVariant::EstOutageConstraint);
    } else {
      const ModelVariant v = parse_variant(n);
      if (!allow_ideal && v == ModelVariant::IdealModel) {
        throw DomainError("variant 'im' is not valid for this subcommand");
      }
      out.push_back(v);
    }
  }
  return out;
}

std::string variant_name(ModelVariant v) { return std::string(to_string(v)); }

double threshold(const ThroughputModel& m, ModelVariant v, double tau_est, double tau_sen) {
  switch (v) {
    case ModelVariant::IdealModel:
      return detector::threshold_for_pd(m.scenario.target_pd, tau_sen, m.powers.P_rx_ST, m.scenario.f_s);
    case ModelVariant::EstAvgConstraint:
      return solve_threshold_avg(m, tau_est, tau_sen);
    case ModelVariant::EstOutageConstraint:
      return solve_threshold_outage(m.scenario, m.powers, tau_est, tau_sen);
    default:
      throw DomainError("unsupported variant");
  }
}

std::vector<double> range_values(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from)) throw DomainError("need --step > 0 and --to >= --from");
  const long n = std::lround((to - from) / step);
  std::vector<double> out;
  for (long k = 0; k <= n; ++k) out.push_back(from + static_cast<double>(k) * step);
  return out;
}

struct Output {
  std::ostringstream buffer;
  RunManifest manifest;
  bool non_converged = false;
};

RunManifest make_manifest(const Common& c, const Scenario& s, const std::string& command) {
  RunManifest m;
  m.scenario_hash = scenario_hash(s);
  m.seed = c.seed;
  m.command = command;
  m.timestamp = timestamp_for(c);
  return m;
}

std::string describe(const TradeoffResult& r) {
  return "tau_est_ms=" + format_number(r.tau_est * 1e3) + ";tau_sen_ms=" +
         format_number(r.tau_sen * 1e3) + ";throughput=" + format_number(r.throughput);
}

// cdf ----------------------------------------------------------------------

struct CdfArgs {
  std::string what;
  std::vector<double> tau_est_ms{5.0};
  std::vector<double> tau_sen_ms{1.0};
  std::string variant = "im";
  std::size_t grid = 201;
};

void run_cdf(const Common& c, const CdfArgs& a, Output& o) {
  const Scenario base = base_scenario(c);
  o.manifest.scenario_hash = scenario_hash(base);
  o.manifest.extra.emplace_back("what", a.what);
  std::vector<std::string> cols{"what", "gamma_p1_db", "gamma_p2_db", "gamma_s_db"};
  if (a.what == "pd") cols.insert(cols.end(), {"variant", "tau_est_ms", "tau_sen_ms", "mu_w"});
  cols.insert(cols.end(), {"x", "cdf"});
  CsvWriter csv(o.buffer, o.manifest, cols);
  for (const Point& p : override_points(c)) {
    const Scenario s = apply(base, p);
    const ThroughputModel m(s);
    const std::vector<CsvWriter::Cell> prefix{a.what, linear_to_db(m.powers.gamma_p1),
                                              linear_to_db(m.powers.gamma_p2),
                                              linear_to_db(m.powers.gamma_s)};
    if (a.what == "pd") {
      const ModelVariant v = parse_variant(a.variant);
      for (const double te : a.tau_est_ms) {
        for (const double ts : a.tau_sen_ms) {
          const double mu = threshold(m, v, ms(te), ms(ts));
          const PdDistribution dist{mu, ms(ts), ms(te), m.powers.P_rx_ST, s.f_s};
          const std::vector<double> xs = numeric::linspace(0.0, 1.0, a.grid);
          const std::vector<double> fs =
              numeric::parallel_map(xs.size(), [&](std::size_t i) { return cdf_pd(dist, xs[i]); });
          for (std::size_t i = 0; i < xs.size(); ++i) {
            auto row = prefix;
            row.insert(row.end(), {variant_name(v), te, ts, mu, xs[i], fs[i]});
            csv.row(row);
          }
        }
      }
    } else {
      const CapacityDistribution dist{a.what == "c0" ? CapacityKind::C0 : CapacityKind::C1, m.gamma};
      const std::vector<double> support = capacity_breaks(dist);
      const std::vector<double> xs = numeric::linspace(support.front(), support.back(), a.grid);
      const std::vector<double> fs = cdf_sorted(dist, xs);
      for (std::size_t i = 0; i < xs.size(); ++i) {
        auto row = prefix;
        row.insert(row.end(), {xs[i], fs[i]});
        csv.row(row);
      }
    }
  }
}

// tradeoff -----------------------------------------------------------------

struct TradeoffArgs {
  std::vector<std::string> variants{"all"};
  double tau_est_ms = 5.0;
  std::size_t grid = 200;
};

void run_tradeoff(const Common& c, const TradeoffArgs& a, Output& o) {
  const Scenario s = single_scenario(c);
  o.manifest.scenario_hash = scenario_hash(s);
  const ThroughputModel m(s);
  const double tau_est = ms(a.tau_est_ms);
  struct Block {
    ModelVariant v;
    std::vector<TradeoffResult> profile;
    TradeoffResult best;
  };
  std::vector<Block> blocks;
  for (const ModelVariant v : parse_variants(a.variants, true)) {
    Block b{v, sensing_profile(m, v, tau_est, a.grid), optimize_sensing(m, v, tau_est, {a.grid})};
    o.manifest.extra.emplace_back("optimum_" + variant_name(v), describe(b.best));
    if (!b.best.converged) o.non_converged = true;
    blocks.push_back(std::move(b));
  }
  CsvWriter csv(o.buffer, o.manifest,
                {"variant", "tau_est_ms", "tau_sen_ms", "throughput", "pfa", "pd_metric", "expected_pd", "mu_w"});
  for (const Block& b : blocks) {
    for (const TradeoffResult& r : b.profile) {
      csv.row({variant_name(b.v), a.tau_est_ms, r.tau_sen * 1e3, r.throughput, r.pfa, r.pd_metric,
               r.expected_pd, r.mu});
    }
  }
}

// joint --------------------------------------------------------------------

struct JointArgs {
  std::vector<std::string> variants{"em-ac", "em-oc"};
  std::size_t grid = 200;
  double est_min_ms = 0.1;
  double est_max_ms = 10.0;
  double est_step_ms = 0.1;
  bool profile = false;
};

void run_joint(const Common& c, const JointArgs& a, Output& o) {
  if (override_points(c).size() != 1) throw DomainError("joint takes at most one value per SNR override");
  Scenario base = apply(base_scenario(c), override_points(c).front());
  o.manifest.scenario_hash = scenario_hash(base);
  const std::vector<double> kappas = c.kappa.empty() ? std::vector<double>{base.kappa} : c.kappa;
  JointOptions options;
  options.est_lo = ms(a.est_min_ms);
  options.est_hi = ms(a.est_max_ms);
  options.est_step = ms(a.est_step_ms);
  options.sensing.grid = a.grid;

  struct Job {
    ModelVariant v;
    double kappa;
  };
  std::vector<Job> jobs;
  for (const ModelVariant v : parse_variants(a.variants, false)) {
    if (v == ModelVariant::EstOutageConstraint) {
      for (const double k : kappas) jobs.push_back({v, k});
    } else {
      jobs.push_back({v, base.kappa});
    }
  }

  if (a.profile) {
    std::vector<std::pair<Job, JointResult>> results;
    for (const Job& j : jobs) {
      Scenario s = base;
      s.kappa = j.kappa;
      const ThroughputModel m(s);
      JointResult r = optimize_joint(m, j.v, options);
      const std::string tag = variant_name(j.v) + (j.v == ModelVariant::EstOutageConstraint
                                                       ? "_kappa_" + format_number(j.kappa)
                                                       : "");
      o.manifest.extra.emplace_back("optimum_" + tag, describe(r.best) + ";interior=" +
                                                           (r.interior ? "1" : "0"));
      if (!r.best.converged) o.non_converged = true;
      results.emplace_back(j, std::move(r));
    }
    CsvWriter csv(o.buffer, o.manifest,
                  {"variant", "kappa", "tau_est_ms", "tau_sen_ms", "throughput", "pfa", "expected_pd",
                   "pd_metric", "mu_w"});
    for (const auto& [j, r] : results) {
      for (const TradeoffResult& p : r.profile) {
        csv.row({variant_name(j.v), j.kappa, p.tau_est * 1e3, p.tau_sen * 1e3, p.throughput, p.pfa,
                 p.expected_pd, p.pd_metric, p.mu});
      }
    }
    return;
  }

  CsvWriter csv(o.buffer, o.manifest, {"variant", "kappa", "tau_est_ms", "tau_sen_ms", "throughput"});
  const std::vector<double> est = estimation_grid(options);
  const std::vector<double> sen = numeric::linspace(options.est_lo, base.T, a.grid);
  for (const Job& j : jobs) {
    Scenario s = base;
    s.kappa = j.kappa;
    const ThroughputModel m(s);
    std::vector<std::pair<double, double>> cells;
    for (const double te : est) {
      for (const double ts : sen) {
        if (ts >= te) cells.emplace_back(te, ts);
      }
    }
    const std::vector<double> values = numeric::parallel_map(cells.size(), [&](std::size_t i) {
      return throughput_estimation(m, j.v, cells[i].first, cells[i].second).throughput;
    });
    for (std::size_t i = 0; i < cells.size(); ++i) {
      csv.row({variant_name(j.v), j.kappa, cells[i].first * 1e3, cells[i].second * 1e3, values[i]});
    }
  }
}

// sweep --------------------------------------------------------------------

struct SweepArgs {
  std::string param;
  double from = 0.0;
  double to = 0.0;
  double step = 1.0;
  std::vector<std::string> variants{"all"};
  double tau_est_ms = 5.0;
  std::size_t grid = 200;
};

void run_sweep(const Common& c, const SweepArgs& a, Output& o) {
  const Scenario base = single_scenario(c);
  o.manifest.scenario_hash = scenario_hash(base);
  const std::vector<ModelVariant> variants = parse_variants(a.variants, true);
  std::vector<std::vector<CsvWriter::Cell>> rows;
  for (const double value : range_values(a.from, a.to, a.step)) {
    Scenario s = base;
    double tau_est = ms(a.tau_est_ms);
    if (a.param == "gamma_p1") s = with_gamma_p1_db(s, value);
    if (a.param == "gamma_p2") s = with_gamma_p2_db(s, value);
    if (a.param == "gamma_s") s = with_gamma_s_db(s, value);
    if (a.param == "kappa") s.kappa = value;
    if (a.param == "tau_est") tau_est = ms(value);
    validate(s);
    const ThroughputModel m(s);
    for (const ModelVariant v : variants) {
      const TradeoffResult r = optimize_sensing(m, v, tau_est, {a.grid});
      if (!r.converged) o.non_converged = true;
      rows.push_back({a.param, value, variant_name(v), tau_est * 1e3, r.tau_sen * 1e3, r.throughput,
                      r.pfa, r.expected_pd, r.pd_metric});
    }
  }
  CsvWriter csv(o.buffer, o.manifest,
                {"param", "value", "variant", "tau_est_ms", "tau_sen_ms", "throughput", "pfa",
                 "expected_pd", "pd_metric"});
  for (const auto& row : rows) csv.row(row);
}

// corollary ----------------------------------------------------------------

struct CorollaryArgs {
  std::vector<std::string> variants{"em-ac", "em-oc"};
  std::vector<double> tau_est_ms{5.0};
  std::size_t trials = 100000;
  std::size_t grid = 200;
};

void run_corollary(const Common& c, const CorollaryArgs& a, Output& o) {
  const Scenario s = single_scenario(c);
  o.manifest.scenario_hash = scenario_hash(s);
  o.manifest.rng_id = mc::kRngId;
  const ThroughputModel m(s);
  std::vector<std::vector<CsvWriter::Cell>> rows;
  for (const ModelVariant v : parse_variants(a.variants, false)) {
    for (const double te : a.tau_est_ms) {
      CorollaryOptions options;
      options.trials = a.trials;
      options.seed = c.seed;
      options.grid = a.grid;
      const CorollaryResult r = corollary_alternative(m, v, ms(te), options);
      if (!r.deterministic.converged) o.non_converged = true;
      rows.push_back({variant_name(v), s.kappa, te, r.deterministic.tau_sen * 1e3,
                      r.deterministic.throughput, r.mean, r.std_error, r.mean_tau_sen * 1e3,
                      static_cast<long long>(r.trials), static_cast<long long>(r.failures)});
    }
  }
  CsvWriter csv(o.buffer, o.manifest,
                {"variant", "kappa", "tau_est_ms", "theorem_tau_sen_ms", "theorem_throughput",
                 "corollary_mean", "std_error", "mean_tau_sen_ms", "trials", "failures"});
  for (const auto& row : rows) csv.row(row);
}

// validate -----------------------------------------------------------------

struct ValidateArgs {
  std::string what;
  double tau_est_ms = 5.0;
  double tau_sen_ms = 1.0;
  std::string variant = "im";
  std::size_t trials = 100000;
  std::size_t grid = 101;
};

void run_validate(const Common& c, const ValidateArgs& a, Output& o) {
  const Scenario s = single_scenario(c);
  o.manifest.scenario_hash = scenario_hash(s);
  o.manifest.rng_id = mc::kRngId;
  const ThroughputModel m(s);
  const double tau_est = ms(a.tau_est_ms);
  const double tau_sen = ms(a.tau_sen_ms);
  if (a.trials < 100) throw DomainError("validate needs at least 100 trials");
  mc::TrialBatch batch = mc::sample_estimates(s, m.powers, tau_est, a.trials, c.seed);
  o.manifest.extra.emplace_back("what", a.what);
  o.manifest.extra.emplace_back("trials", std::to_string(a.trials));
  o.manifest.extra.emplace_back("estimation_samples", std::to_string(batch.est_samples));

  if (a.what == "throughput") {
    const ModelVariant v = parse_variant(a.variant);
    const double mu = threshold(m, v, tau_est, tau_sen);
    mc::evaluate_detection(batch, mu, tau_sen, s.f_s);
    const double pfa = detector::prob_false_alarm(mu, tau_sen, s.sigma_w2, s.f_s);
    std::vector<double> realized(batch.trials);
    for (std::size_t i = 0; i < batch.trials; ++i) {
      realized[i] = m.time_factor(tau_sen) * (batch.samples_c0[i] * (1.0 - pfa) * (1.0 - s.p_H1) +
                                              batch.samples_c1[i] * (1.0 - batch.samples_pd[i]) * s.p_H1);
    }
    const PdDistribution dist{mu, tau_sen, tau_est, m.powers.P_rx_ST, s.f_s};
    const double epd = expect_pd(dist, {1e-11, 0.0, 4000});
    const double analytic = m.time_factor(tau_sen) * (m.mean_c0 * (1.0 - pfa) * (1.0 - s.p_H1) +
                                                      m.mean_c1 * (1.0 - epd) * s.p_H1);
    o.manifest.extra.emplace_back("variant", variant_name(v));
    o.manifest.extra.emplace_back("mu_w", format_number(mu));
    CsvWriter csv(o.buffer, o.manifest, {"quantity", "analytic", "simulated", "std_error"});
    const auto put = [&](const std::string& name, double exact, std::span<const double> xs) {
      const mc::MeanEstimate e = mc::mean_and_error(xs);
      csv.row({name, exact, e.mean, e.std_error});
    };
    put("throughput", analytic, realized);
    put("expected_pd", epd, batch.samples_pd);
    put("mean_c0", m.mean_c0, batch.samples_c0);
    put("mean_c1", m.mean_c1, batch.samples_c1);
    return;
  }

  std::vector<double> samples;
  std::function<std::vector<double>(const std::vector<double>&)> analytic;
  double lo = 0.0, hi = 1.0;
  if (a.what == "pd") {
    const ModelVariant v = parse_variant(a.variant);
    const double mu = threshold(m, v, tau_est, tau_sen);
    o.manifest.extra.emplace_back("variant", variant_name(v));
    o.manifest.extra.emplace_back("mu_w", format_number(mu));
    mc::evaluate_detection(batch, mu, tau_sen, s.f_s);
    samples = batch.samples_pd;
    const PdDistribution dist{mu, tau_sen, tau_est, m.powers.P_rx_ST, s.f_s};
    analytic = [dist](const std::vector<double>& xs) {
      return numeric::parallel_map(xs.size(), [&](std::size_t i) { return cdf_pd(dist, xs[i]); });
    };
  } else {
    const CapacityDistribution dist{a.what == "c0" ? CapacityKind::C0 : CapacityKind::C1, m.gamma};
    samples = a.what == "c0" ? batch.samples_c0 : batch.samples_c1;
    analytic = [dist](const std::vector<double>& xs) { return cdf_sorted(dist, xs); };
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    lo = *mn;
    hi = *mx;
  }
  const mc::EmpiricalCdf ecdf(samples);
  const double ks = mc::ks_distance_sorted(ecdf.sorted(), analytic(ecdf.sorted()),
                                           analytic(mc::left_neighbours(ecdf.sorted())));
  o.manifest.extra.emplace_back("ks_distance", format_number(ks));
  const std::vector<double> xs = numeric::linspace(lo, hi, a.grid);
  const std::vector<double> fs = analytic(xs);
  CsvWriter csv(o.buffer, o.manifest, {"x", "empirical", "analytic"});
  for (std::size_t i = 0; i < xs.size(); ++i) csv.row({xs[i], ecdf(xs[i]), fs[i]});
}

std::string join_args(const std::vector<std::string>& args) {
  std::string out;
  for (const std::string& a : args) {
    if (!out.empty()) out += ' ';
    out += a;
  }
  return out;
}

void add_common(CLI::App* sub, Common& c) {
  auto* scen = sub->add_option("--scenario", c.scenario_path, "Scenario config file (key = value)");
  sub->add_option("--preset", c.preset, "Built-in scenario")
      ->check(CLI::IsMember({"table2"}))
      ->excludes(scen);
  sub->add_option("--out", c.out_path, "Write CSV here instead of standard output");
  sub->add_option("--seed", c.seed, "Master seed of the random streams");
  sub->add_option("--timestamp", c.timestamp,
                  "Manifest timestamp (default: SOURCE_DATE_EPOCH, else current UTC time)");
  sub->add_option("--gamma-p1-db", c.gamma_p1_db, "Override sensing SNR [dB]")->delimiter(',');
  sub->add_option("--gamma-p2-db", c.gamma_p2_db, "Override interference-to-noise ratio [dB]")
      ->delimiter(',');
  sub->add_option("--gamma-s-db", c.gamma_s_db, "Override access SNR [dB]")->delimiter(',');
  sub->add_option("--kappa", c.kappa, "Outage level(s)")->delimiter(',');
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Estimation-sensing-throughput analysis for interweave cognitive radio", "cogsense"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Common common;
  CdfArgs cdf;
  TradeoffArgs tradeoff;
  JointArgs joint;
  SweepArgs sweep;
  CorollaryArgs corollary;
  ValidateArgs validate_args;
  const std::vector<std::string> variant_names{"im", "em-ac", "em-oc", "all"};

  auto* c_cdf = app.add_subcommand("cdf", "Analytic CDF of P_d, C0 or C1 on a grid");
  add_common(c_cdf, common);
  c_cdf->add_option("--what", cdf.what)->required()->check(CLI::IsMember({"pd", "c0", "c1"}));
  c_cdf->add_option("--tau-est", cdf.tau_est_ms, "Estimation time(s) [ms]")->delimiter(',');
  c_cdf->add_option("--tau-sen", cdf.tau_sen_ms, "Sensing time(s) [ms]")->delimiter(',');
  c_cdf->add_option("--variant", cdf.variant, "Threshold rule for pd")
      ->check(CLI::IsMember({"im", "em-ac", "em-oc"}));
  c_cdf->add_option("--grid", cdf.grid, "Grid points")->check(CLI::Range(2, 1000000));

  auto* c_tradeoff = app.add_subcommand("tradeoff", "Throughput versus sensing time");
  add_common(c_tradeoff, common);
  c_tradeoff->add_option("--variant", tradeoff.variants)->delimiter(',')->check(CLI::IsMember(variant_names));
  c_tradeoff->add_option("--tau-est", tradeoff.tau_est_ms, "Estimation time [ms]");
  c_tradeoff->add_option("--grid", tradeoff.grid, "Sensing-time grid points")->check(CLI::Range(3, 1000000));

  auto* c_joint = app.add_subcommand("joint", "Throughput over estimation and sensing time");
  add_common(c_joint, common);
  c_joint->add_option("--variant", joint.variants)->delimiter(',')->check(CLI::IsMember({"em-ac", "em-oc", "all"}));
  c_joint->add_option("--grid", joint.grid, "Sensing-time grid points")->check(CLI::Range(3, 1000000));
  c_joint->add_option("--est-min", joint.est_min_ms, "Smallest estimation time [ms]");
  c_joint->add_option("--est-max", joint.est_max_ms, "Largest estimation time [ms]");
  c_joint->add_option("--est-step", joint.est_step_ms, "Estimation-time step [ms]");
  c_joint->add_flag("--profile", joint.profile, "Emit the optimum over sensing time per estimation time");

  auto* c_sweep = app.add_subcommand("sweep", "Optimal throughput versus a scenario parameter");
  add_common(c_sweep, common);
  c_sweep->add_option("--param", sweep.param)
      ->required()
      ->check(CLI::IsMember({"gamma_p1", "gamma_p2", "gamma_s", "kappa", "tau_est"}));
  c_sweep->add_option("--from", sweep.from)->required();
  c_sweep->add_option("--to", sweep.to)->required();
  c_sweep->add_option("--step", sweep.step);
  c_sweep->add_option("--variant", sweep.variants)->delimiter(',')->check(CLI::IsMember(variant_names));
  c_sweep->add_option("--tau-est", sweep.tau_est_ms, "Estimation time [ms]");
  c_sweep->add_option("--grid", sweep.grid, "Sensing-time grid points")->check(CLI::Range(3, 1000000));

  auto* c_cor = app.add_subcommand("corollary", "Per-realization sensing time, averaged by simulation");
  add_common(c_cor, common);
  c_cor->add_option("--variant", corollary.variants)->delimiter(',')->check(CLI::IsMember({"em-ac", "em-oc", "all"}));
  c_cor->add_option("--tau-est", corollary.tau_est_ms, "Estimation time(s) [ms]")->delimiter(',');
  c_cor->add_option("--trials", corollary.trials)->check(CLI::Range(static_cast<std::size_t>(10000), static_cast<std::size_t>(1) << 40));
  c_cor->add_option("--grid", corollary.grid, "Sensing-time grid points")->check(CLI::Range(3, 1000000));

  auto* c_val = app.add_subcommand("validate", "Compare analytic results with simulation");
  add_common(c_val, common);
  c_val->add_option("--what", validate_args.what)
      ->required()
      ->check(CLI::IsMember({"pd", "c0", "c1", "throughput"}));
  c_val->add_option("--tau-est", validate_args.tau_est_ms, "Estimation time [ms]");
  c_val->add_option("--tau-sen", validate_args.tau_sen_ms, "Sensing time [ms]");
  c_val->add_option("--variant", validate_args.variant)->check(CLI::IsMember({"im", "em-ac", "em-oc"}));
  c_val->add_option("--trials", validate_args.trials)->check(CLI::Range(static_cast<std::size_t>(100), static_cast<std::size_t>(1) << 40));
  c_val->add_option("--grid", validate_args.grid, "CDF grid points")->check(CLI::Range(2, 1000000));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    const int code = app.exit(e, help_out, err);
    out << help_out.str();
    return code == 0 ? kOk : kUsageOrConfig;
  }

  Output o;
  try {
    const Scenario s = base_scenario(common);
    o.manifest = make_manifest(common, s, join_args(args));
    if (c_cdf->parsed()) run_cdf(common, cdf, o);
    if (c_tradeoff->parsed()) run_tradeoff(common, tradeoff, o);
    if (c_joint->parsed()) run_joint(common, joint, o);
    if (c_sweep->parsed()) run_sweep(common, sweep, o);
    if (c_cor->parsed()) run_corollary(common, corollary, o);
    if (c_val->parsed()) run_validate(common, validate_args, o);
  } catch (const ParseError& e) {
    err << "cogsense: scenario error: " << e.what() << '\n';
    return kUsageOrConfig;
  } catch (const ValidationError& e) {
    err << "cogsense: " << e.what() << '\n';
    return kUsageOrConfig;
  } catch (const DomainError& e) {
    err << "cogsense: " << e.what() << '\n';
    return kUsageOrConfig;
  } catch (const ConvergenceError& e) {
    err << "cogsense: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const InfeasibleError& e) {
    err << "cogsense: infeasible: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    err << "cogsense: " << e.what() << '\n';
    return kFailure;
  }

  if (common.out_path.empty()) {
    out << o.buffer.str();
  } else {
    std::ofstream file(common.out_path, std::ios::binary);
    file << o.buffer.str();
    if (!file) {
      err << "cogsense: cannot write '" << common.out_path << "'\n";
      return kFailure;
    }
  }
  if (o.non_converged) {
    err << "cogsense: warning: a throughput profile has more than one local maximum; "
           "the best grid point was reported\n";
    return kNumerical;
  }
  return kOk;
}

}  // namespace cogsense::cli
