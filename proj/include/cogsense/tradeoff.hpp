#ifndef COGSENSE_TRADEOFF_HPP_
#define COGSENSE_TRADEOFF_HPP_

// Secondary throughput under a detection constraint and its maximization over
// the sensing time (and the estimation time).
//
//   R(tau_sen) = (T - tau_sen) / T * [C0 (1 - P_fa) P(H0) + C1 (1 - P_d) P(H1)]
//
// The ideal model uses the true channels and P_d = target. The estimation
// model replaces C0, C1, P_d with their expectations and sets the threshold by
// either an average constraint (E[P_d] = target) or an outage constraint
// (P(P_d <= target) = kappa).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cogsense/detector.hpp"
#include "cogsense/distributions.hpp"
#include "cogsense/errors.hpp"
#include "cogsense/montecarlo.hpp"
#include "cogsense/numeric.hpp"
#include "cogsense/radio_model.hpp"
#include "cogsense/specfun.hpp"

namespace cogsense {

enum class ModelVariant { IdealModel, EstAvgConstraint, EstOutageConstraint, CorollaryAlternative };

inline std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::IdealModel: return "im";
    case ModelVariant::EstAvgConstraint: return "em-ac";
    case ModelVariant::EstOutageConstraint: return "em-oc";
    case ModelVariant::CorollaryAlternative: return "corollary";
  }
  return "?";
}

struct TradeoffResult {
  ModelVariant variant = ModelVariant::IdealModel;
  double tau_est = 0.0;     // [s]
  double tau_sen = 0.0;     // [s]
  double mu = 0.0;          // [W]
  double throughput = 0.0;  // [bits/s/Hz]
  double pfa = 0.0;
  /// P_d (ideal), E[P_d] (average constraint) or P(P_d <= target) (outage constraint).
  double pd_metric = 0.0;
  /// E[P_d] for both estimation variants, P_d for the ideal model.
  double expected_pd = 0.0;
  bool converged = true;
};

/// Scenario-level quantities shared by every throughput evaluation.
struct ThroughputModel {
  Scenario scenario;
  DerivedPowers powers;
  GammaApprox gamma;
  double c0 = 0.0;       // true capacities
  double c1 = 0.0;
  double mean_c0 = 0.0;  // expectations under estimation
  double mean_c1 = 0.0;

  explicit ThroughputModel(const Scenario& s)
      : scenario(s), powers(derive(s)), gamma(gamma_params(s, powers)) {
    c0 = std::log2(1.0 + powers.gamma_s);
    c1 = std::log2(1.0 + powers.gamma_s / (1.0 + powers.gamma_p2));
    mean_c0 = expect_capacity({CapacityKind::C0, gamma});
    mean_c1 = expect_capacity({CapacityKind::C1, gamma});
  }

  double time_factor(double tau_sen) const { return (scenario.T - tau_sen) / scenario.T; }
};

namespace detail {

inline void check_frame(const Scenario& s, double tau_est, double tau_sen) {
  if (!(tau_est > 0.0) || !(tau_est <= tau_sen) || !(tau_sen <= s.T)) {
    throw DomainError("frame constraint violated: need 0 < tau_est <= tau_sen <= T");
  }
  if (tau_est * s.f_s < 1.0) throw DomainError("tau_est must span at least one sample");
}

// Threshold rules only need both windows to hold at least one sample.
inline void check_windows(const Scenario& s, double tau_est, double tau_sen) {
  if (!(tau_est * s.f_s >= 1.0) || !(tau_sen * s.f_s >= 1.0)) {
    throw DomainError("tau_est and tau_sen must each span at least one sample");
  }
}

inline constexpr double kPdQuadTol = 1e-11;

inline double expected_pd(const ThroughputModel& m, double mu, double tau_est, double tau_sen) {
  const PdDistribution dist{mu, tau_sen, tau_est, m.powers.P_rx_ST, m.scenario.f_s};
  return expect_pd(dist, {kPdQuadTol, 0.0, 4000});
}

}  // namespace detail

/// Ideal model at sensing time tau_sen (tau_est is carried along for reporting).
inline TradeoffResult throughput_ideal(const ThroughputModel& m, double tau_sen,
                                       double tau_est = 0.0) {
  const Scenario& s = m.scenario;
  if (!(tau_sen > 0.0) || !(tau_sen <= s.T) || tau_sen * s.f_s < 1.0) {
    throw DomainError("throughput_ideal: need 0 < tau_sen <= T with at least one sample");
  }
  TradeoffResult r;
  r.variant = ModelVariant::IdealModel;
  r.tau_est = tau_est;
  r.tau_sen = tau_sen;
  r.mu = detector::threshold_for_pd(s.target_pd, tau_sen, m.powers.P_rx_ST, s.f_s);
  r.pfa = detector::prob_false_alarm(r.mu, tau_sen, s.sigma_w2, s.f_s);
  r.pd_metric = s.target_pd;
  r.expected_pd = s.target_pd;
  r.throughput = m.time_factor(tau_sen) *
                 (m.c0 * (1.0 - r.pfa) * (1.0 - s.p_H1) + m.c1 * (1.0 - s.target_pd) * s.p_H1);
  return r;
}

inline TradeoffResult throughput_ideal(const Scenario& s, const DerivedPowers&, double tau_sen) {
  return throughput_ideal(ThroughputModel(s), tau_sen);
}

/// Threshold at which E[P_d] equals the target (root in log mu).
inline double solve_threshold_avg(const ThroughputModel& m, double tau_est, double tau_sen) {
  const Scenario& s = m.scenario;
  detail::check_windows(s, tau_est, tau_sen);
  auto g = [&](double log_mu) {
    return detail::expected_pd(m, std::exp(log_mu), tau_est, tau_sen) - s.target_pd;
  };
  const double ideal = std::log(detector::threshold_for_pd(s.target_pd, tau_sen, m.powers.P_rx_ST, s.f_s));
  const double step = std::sqrt(2.0 / (tau_est * s.f_s)) + 1e-3;
  double lo = ideal - 3.0 * step;
  double hi = ideal;
  double g_lo = g(lo);
  double g_hi = g(hi);
  for (int i = 0; i < 60 && g_lo < 0.0; ++i) {
    hi = lo;
    g_hi = g_lo;
    lo -= 3.0 * step * (i + 1);
    g_lo = g(lo);
  }
  for (int i = 0; i < 60 && g_hi > 0.0; ++i) {
    lo = hi;
    g_lo = g_hi;
    hi += 3.0 * step * (i + 1);
    g_hi = g(hi);
  }
  if (g_lo < 0.0 || g_hi > 0.0) {
    throw InfeasibleError("average constraint infeasible: E[P_d] stays below the target");
  }
  return std::exp(numeric::brent_root(g, lo, hi, g_lo, g_hi, 1e-11));
}

inline double solve_threshold_avg(const Scenario& s, const DerivedPowers&, double tau_est,
                                  double tau_sen) {
  return solve_threshold_avg(ThroughputModel(s), tau_est, tau_sen);
}

/// Threshold at which P(P_d <= target) equals kappa (closed form).
inline double solve_threshold_outage(const Scenario& s, const DerivedPowers& d, double tau_est,
                                     double tau_sen) {
  detail::check_windows(s, tau_est, tau_sen);
  const double a_est = detector::half_dof(tau_est, s.f_s);
  const double a_sen = detector::half_dof(tau_sen, s.f_s);
  return d.P_rx_ST * specfun::inv_reg_upper_gamma(1.0 - s.kappa, a_est) *
         specfun::inv_reg_upper_gamma(s.target_pd, a_sen) / (a_est * a_sen);
}

/// Estimation-model throughput at (tau_est, tau_sen) for EstAvgConstraint or EstOutageConstraint.
inline TradeoffResult throughput_estimation(const ThroughputModel& m, ModelVariant variant,
                                            double tau_est, double tau_sen) {
  const Scenario& s = m.scenario;
  detail::check_frame(s, tau_est, tau_sen);
  TradeoffResult r;
  r.variant = variant;
  r.tau_est = tau_est;
  r.tau_sen = tau_sen;
  switch (variant) {
    case ModelVariant::EstAvgConstraint:
      r.mu = solve_threshold_avg(m, tau_est, tau_sen);
      r.expected_pd = detail::expected_pd(m, r.mu, tau_est, tau_sen);
      r.pd_metric = r.expected_pd;
      break;
    case ModelVariant::EstOutageConstraint:
      r.mu = solve_threshold_outage(s, m.powers, tau_est, tau_sen);
      r.expected_pd = detail::expected_pd(m, r.mu, tau_est, tau_sen);
      r.pd_metric = cdf_pd({r.mu, tau_sen, tau_est, m.powers.P_rx_ST, s.f_s}, s.target_pd);
      break;
    default:
      throw DomainError("throughput_estimation: variant must be em-ac or em-oc");
  }
  r.pfa = detector::prob_false_alarm(r.mu, tau_sen, s.sigma_w2, s.f_s);
  r.throughput = m.time_factor(tau_sen) * (m.mean_c0 * (1.0 - r.pfa) * (1.0 - s.p_H1) +
                                           m.mean_c1 * (1.0 - r.expected_pd) * s.p_H1);
  return r;
}

inline TradeoffResult throughput_estimation(const Scenario& s, const DerivedPowers&,
                                            ModelVariant variant, double tau_est, double tau_sen) {
  return throughput_estimation(ThroughputModel(s), variant, tau_est, tau_sen);
}

/// Throughput of IdealModel, EstAvgConstraint or EstOutageConstraint at one point.
inline TradeoffResult evaluate(const ThroughputModel& m, ModelVariant variant, double tau_est,
                               double tau_sen) {
  if (variant == ModelVariant::IdealModel) return throughput_ideal(m, tau_sen, tau_est);
  return throughput_estimation(m, variant, tau_est, tau_sen);
}

struct SensingOptions {
  std::size_t grid = 200;
  double rel_tol = 1e-6;  // golden-section tolerance relative to T
  bool parallel = true;
};

namespace detail {

/// Number of local maxima of a sampled profile, ignoring wiggles below `noise`.
inline int count_local_maxima(const std::vector<double>& v, double noise) {
  int maxima = 0;
  int trend = 1;  // +1 rising, -1 falling; a leading fall marks a maximum at the start
  double anchor = v.front();
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > anchor + noise) {
      trend = 1;
      anchor = v[i];
    } else if (v[i] < anchor - noise) {
      if (trend == 1) ++maxima;
      trend = -1;
      anchor = v[i];
    } else if (trend >= 0 && v[i] > anchor) {
      anchor = v[i];
    } else if (trend < 0 && v[i] < anchor) {
      anchor = v[i];
    }
  }
  if (trend == 1) ++maxima;
  return maxima;
}

template <class F>
std::vector<TradeoffResult> map_points(const std::vector<double>& xs, bool parallel, F&& f) {
  if (parallel) return numeric::parallel_map(xs.size(), [&](std::size_t i) { return f(xs[i]); });
  std::vector<TradeoffResult> out;
  out.reserve(xs.size());
  for (const double x : xs) out.push_back(f(x));
  return out;
}

}  // namespace detail

/// Sensing-time profile on a uniform grid over [tau_est, T].
inline std::vector<TradeoffResult> sensing_profile(const ThroughputModel& m, ModelVariant variant,
                                                   double tau_est, std::size_t grid,
                                                   bool parallel = true) {
  const std::vector<double> taus =
      numeric::linspace(tau_est, m.scenario.T, std::max<std::size_t>(grid, 2));
  return detail::map_points(taus, parallel,
                            [&](double tau) { return evaluate(m, variant, tau_est, tau); });
}

/// Maximizes throughput over tau_sen in [tau_est, T]: grid scan, then
/// golden-section refinement between the neighbours of the best grid point.
/// A profile with more than one local maximum yields the best grid point and
/// converged = false.
inline TradeoffResult optimize_sensing(const ThroughputModel& m, ModelVariant variant,
                                       double tau_est, const SensingOptions& options = {}) {
  const Scenario& s = m.scenario;
  if (!(tau_est > 0.0) || !(tau_est <= s.T)) {
    throw DomainError("optimize_sensing: need 0 < tau_est <= T");
  }
  const std::vector<TradeoffResult> profile =
      sensing_profile(m, variant, tau_est, options.grid, options.parallel);
  std::vector<double> values(profile.size());
  std::transform(profile.begin(), profile.end(), values.begin(),
                 [](const TradeoffResult& r) { return r.throughput; });
  const auto best_it = std::max_element(values.begin(), values.end());
  const std::size_t best = static_cast<std::size_t>(best_it - values.begin());
  const double noise = 1e-12 * std::max(1.0, std::abs(*best_it));
  if (detail::count_local_maxima(values, noise) > 1) {
    TradeoffResult r = profile[best];
    r.converged = false;
    return r;
  }
  const double lo = profile[best == 0 ? 0 : best - 1].tau_sen;
  const double hi = profile[std::min(best + 1, profile.size() - 1)].tau_sen;
  const auto peak = numeric::golden_section_maximize(
      [&](double tau) { return evaluate(m, variant, tau_est, tau).throughput; }, lo, hi,
      options.rel_tol * s.T);
  TradeoffResult r = peak.value >= profile[best].throughput ? evaluate(m, variant, tau_est, peak.x)
                                                             : profile[best];
  r.converged = true;
  return r;
}

inline TradeoffResult optimize_sensing(const Scenario& s, const DerivedPowers&, ModelVariant variant,
                                       double tau_est, const SensingOptions& options = {}) {
  return optimize_sensing(ThroughputModel(s), variant, tau_est, options);
}

struct JointOptions {
  double est_lo = 0.1e-3;    // [s]
  double est_hi = 10e-3;     // [s]
  double est_step = 0.1e-3;  // [s]
  SensingOptions sensing;
};

struct JointResult {
  TradeoffResult best;
  std::vector<TradeoffResult> profile;  // optimum over tau_sen for each tau_est
  bool interior = false;                // best tau_est strictly inside the grid
};

inline std::vector<double> estimation_grid(const JointOptions& options) {
  const long n = std::lround((options.est_hi - options.est_lo) / options.est_step);
  std::vector<double> out;
  for (long k = 0; k <= n; ++k) out.push_back(options.est_lo + static_cast<double>(k) * options.est_step);
  return out;
}

/// Joint maximization over (tau_est, tau_sen): grid over tau_est, optimize_sensing inside.
inline JointResult optimize_joint(const ThroughputModel& m, ModelVariant variant,
                                  const JointOptions& options = {}) {
  if (variant == ModelVariant::IdealModel || variant == ModelVariant::CorollaryAlternative) {
    throw DomainError("optimize_joint: variant must be em-ac or em-oc");
  }
  std::vector<double> grid = estimation_grid(options);
  std::erase_if(grid, [&](double t) { return !(t > 0.0 && t <= m.scenario.T); });
  if (grid.empty()) throw DomainError("optimize_joint: empty estimation-time grid");
  SensingOptions inner = options.sensing;
  inner.parallel = false;
  JointResult out;
  out.profile = numeric::parallel_map(grid.size(), [&](std::size_t i) {
    return optimize_sensing(m, variant, grid[i], inner);
  });
  const auto best = std::max_element(out.profile.begin(), out.profile.end(),
                                     [](const TradeoffResult& a, const TradeoffResult& b) {
                                       return a.throughput < b.throughput;
                                     });
  out.best = *best;
  const auto index = best - out.profile.begin();
  out.interior = index > 0 && index + 1 < static_cast<std::ptrdiff_t>(out.profile.size());
  out.best.converged = std::all_of(out.profile.begin(), out.profile.end(),
                                   [](const TradeoffResult& r) { return r.converged; });
  return out;
}

/// Threshold as a function of the sensing time for a fixed tau_est, tabulated
/// and interpolated (PCHIP in log mu).
class ThresholdCurve {
 public:
  ThresholdCurve(const ThroughputModel& m, ModelVariant variant, double tau_est,
                 std::vector<double> nodes)
      : curve_(build(m, variant, tau_est, nodes)), lo_(nodes.front()), hi_(nodes.back()) {}

  double operator()(double tau_sen) const {
    return std::exp(curve_(std::clamp(tau_sen, lo_, hi_)));
  }

 private:
  static numeric::Pchip build(const ThroughputModel& m, ModelVariant variant, double tau_est,
                     std::vector<double>& nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::vector<double> log_mu = numeric::parallel_map(nodes.size(), [&](std::size_t i) {
      const double mu = variant == ModelVariant::EstAvgConstraint
                            ? solve_threshold_avg(m, tau_est, nodes[i])
                            : solve_threshold_outage(m.scenario, m.powers, tau_est, nodes[i]);
      return std::log(mu);
    });
    std::vector<double> xs = nodes;
    return numeric::Pchip(std::move(xs), std::move(log_mu));
  }

  numeric::Pchip curve_;
  double lo_;
  double hi_;
};

struct CorollaryOptions {
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  bool exact_estimates = false;  // replace every estimate by the true value
  std::size_t grid = 200;
  double rel_tol = 1e-6;
};

struct CorollaryResult {
  TradeoffResult deterministic;  // optimum of the corresponding estimation-model variant
  double mean = 0.0;             // mean realized throughput
  double std_error = 0.0;
  double mean_tau_sen = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  mc::TrialBatch batch;
};

/// Per-realization alternative: every trial draws channel estimates, picks its
/// own sensing time maximizing the realized throughput under the constraint's
/// threshold rule, and the realized throughputs are averaged.
inline CorollaryResult corollary_alternative(const ThroughputModel& m, ModelVariant constraint,
                                             double tau_est, const CorollaryOptions& options = {}) {
  if (constraint != ModelVariant::EstAvgConstraint &&
      constraint != ModelVariant::EstOutageConstraint) {
    throw DomainError("corollary_alternative: constraint must be em-ac or em-oc");
  }
  if (options.trials < 10000) throw DomainError("corollary_alternative: need at least 10000 trials");
  const Scenario& s = m.scenario;
  CorollaryResult out;
  out.deterministic = optimize_sensing(m, constraint, tau_est, {options.grid, options.rel_tol, true});
  const double t_star = out.deterministic.tau_sen;
  const double step = (s.T - tau_est) / static_cast<double>(options.grid - 1);
  const double w_lo = std::max(tau_est, t_star - 4.0 * step);
  const double w_hi = std::min(s.T, t_star + 4.0 * step);

  std::vector<double> nodes = numeric::linspace(tau_est, s.T, options.grid);
  for (const double t : numeric::linspace(w_lo, w_hi, 81)) nodes.push_back(t);
  const ThresholdCurve mu_of(m, constraint, tau_est, nodes);

  mc::TrialBatch batch = options.exact_estimates ? mc::TrialBatch{} : mc::sample_estimates(s, m.powers, tau_est, options.trials, options.seed);
  if (options.exact_estimates) {
    batch.seed = options.seed;
    batch.trials = options.trials;
    batch.est_samples = mc::sample_count(tau_est, s.f_s);
    batch.p_hat.assign(options.trials, m.powers.P_rx_ST);
    batch.h_hat.assign(options.trials, std::sqrt(s.h_s_gain));
    batch.p_sr_hat.assign(options.trials, m.powers.P_rx_SR);
    batch.samples_c0.assign(options.trials, m.c0);
    batch.samples_c1.assign(options.trials, m.c1);
  }
  const std::size_t n = batch.trials;
  batch.samples_pd.assign(n, 0.0);
  batch.samples_tau_sen.assign(n, 0.0);
  std::vector<double> realized(n, 0.0);
  std::vector<char> failed(n, 0);
  const double tol = options.rel_tol * s.T;

  const std::size_t blocks = (n + mc::kBlockSize - 1) / mc::kBlockSize;
  numeric::parallel_map(blocks, [&](std::size_t b) {
    const std::size_t first = b * mc::kBlockSize;
    const std::size_t last = std::min(n, first + mc::kBlockSize);
    for (std::size_t i = first; i < last; ++i) {
      try {
        const double c0 = batch.samples_c0[i];
        const double c1 = batch.samples_c1[i];
        const double p_hat = batch.p_hat[i];
        auto rate = [&](double tau) {
          const double mu = mu_of(tau);
          const double pfa = detector::prob_false_alarm(mu, tau, s.sigma_w2, s.f_s);
          const double pd = detector::prob_detection(mu, tau, p_hat, s.f_s);
          return m.time_factor(tau) * (c0 * (1.0 - pfa) * (1.0 - s.p_H1) + c1 * (1.0 - pd) * s.p_H1);
        };
        numeric::Extremum peak = numeric::golden_section_maximize(rate, w_lo, w_hi, tol);
        const bool at_edge = (peak.x - w_lo < 2.0 * tol && w_lo > tau_est) ||
                             (w_hi - peak.x < 2.0 * tol && w_hi < s.T);
        if (at_edge) {
          const std::vector<double> taus = numeric::linspace(tau_est, s.T, options.grid);
          std::size_t k_best = 0;
          double v_best = -1.0;
          for (std::size_t k = 0; k < taus.size(); ++k) {
            const double v = rate(taus[k]);
            if (v > v_best) {
              v_best = v;
              k_best = k;
            }
          }
          peak = numeric::golden_section_maximize(rate, taus[k_best == 0 ? 0 : k_best - 1],
                                                  taus[std::min(k_best + 1, taus.size() - 1)], tol);
        }
        if (!std::isfinite(peak.value)) throw ConvergenceError("non-finite realized throughput");
        realized[i] = peak.value;
        batch.samples_tau_sen[i] = peak.x;
        batch.samples_pd[i] = detector::prob_detection(mu_of(peak.x), peak.x, p_hat, s.f_s);
      } catch (const std::exception&) {
        failed[i] = 1;
      }
    }
    return 0;
  });

  std::vector<double> ok;
  std::vector<double> taus;
  ok.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (failed[i]) {
      ++out.failures;
    } else {
      ok.push_back(realized[i]);
      taus.push_back(batch.samples_tau_sen[i]);
    }
  }
  if (static_cast<double>(out.failures) > 1e-3 * static_cast<double>(n) || ok.empty()) {
    throw ConvergenceError("corollary_alternative: " + std::to_string(out.failures) + " of " +
                           std::to_string(n) + " trials failed");
  }
  const mc::MeanEstimate est = mc::mean_and_error(ok);
  out.mean = est.mean;
  out.std_error = est.std_error;
  out.mean_tau_sen = mc::mean_and_error(taus).mean;
  out.trials = n;
  out.batch = std::move(batch);
  return out;
}

}  // namespace cogsense

#endif  // COGSENSE_TRADEOFF_HPP_
