#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cogsense/detector.hpp"
#include "cogsense/distributions.hpp"
#include "cogsense/montecarlo.hpp"
#include "cogsense/radio_model.hpp"
#include "cogsense/tradeoff.hpp"
#include "oracles.hpp"

using namespace cogsense;

namespace {

const Scenario kS = table2();
const DerivedPowers kD = derive(kS);

PdDistribution pd_at(double mu, double tau_est, double tau_sen) {
  return {mu, tau_sen, tau_est, kD.P_rx_ST, kS.f_s};
}

double threshold_90(double tau_sen) {
  return detector::threshold_for_pd(0.9, tau_sen, kD.P_rx_ST, kS.f_s);
}

// Independent sampler: std::gamma_distribution for P_hat, direct P_d formula via Boost.
std::vector<double> sample_pd(double mu, double tau_est, double tau_sen, int n, unsigned seed) {
  const double a_est = 0.5 * tau_est * kS.f_s;
  const double a_sen = 0.5 * tau_sen * kS.f_s;
  std::mt19937_64 gen(seed);
  std::gamma_distribution<double> g(a_est, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) {
    const double p_hat = kD.P_rx_ST * g(gen) / a_est;
    v = oracle::boost_q(a_sen, a_sen * mu / p_hat);
  }
  return out;
}

double ks_against(std::vector<double> samples, const std::function<double(double)>& f) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double fx = f(samples[i]);
    d = std::max({d, std::abs(fx - i / n), std::abs((i + 1) / n - fx)});
  }
  return d;
}

}  // namespace

TEST(CdfPd, EndpointsAndMonotone) {
  const auto d = pd_at(threshold_90(1e-3), 5e-3, 1e-3);
  EXPECT_EQ(cdf_pd(d, 0.0), 0.0);
  EXPECT_EQ(cdf_pd(d, 1.0), 1.0);
  double prev = 0.0;
  for (double x = 0.001; x < 1.0; x += 0.001) {
    const double f = cdf_pd(d, x);
    EXPECT_GE(f, prev - 1e-15) << x;
    prev = f;
  }
  EXPECT_THROW(cdf_pd(d, 1.5), DomainError);
}

TEST(CdfPd, AgreesWithIndependentSampler) {
  const double mu = threshold_90(1e-3);
  const auto d = pd_at(mu, 5e-3, 1e-3);
  const auto samples = sample_pd(mu, 5e-3, 1e-3, 100000, 11);
  EXPECT_LT(ks_against(samples, [&](double x) { return cdf_pd(d, x); }), 0.01);
}

TEST(CdfPd, SpreadShrinksWithLongerEstimation) {
  const double mu = threshold_90(1e-3);
  auto iqr = [&](double tau_est) {
    const auto d = pd_at(mu, tau_est, 1e-3);
    const double q25 = oracle::bisect([&](double x) { return cdf_pd(d, x) - 0.25; }, 1e-12, 1 - 1e-12);
    const double q75 = oracle::bisect([&](double x) { return cdf_pd(d, x) - 0.75; }, 1e-12, 1 - 1e-12);
    return q75 - q25;
  };
  const double w1 = iqr(1e-3), w5 = iqr(5e-3), w10 = iqr(10e-3);
  EXPECT_GT(w1, w5);
  EXPECT_GT(w5, w10);
}

TEST(ExpectPd, MatchesDirectIntegralOfSurvival) {
  const double mu = threshold_90(1e-3);
  const auto d = pd_at(mu, 5e-3, 1e-3);
  // E[P_d] = integral of 1 - F over [0,1], evaluated through the CDF itself.
  const double ref = oracle::simpson([&](double x) { return 1.0 - cdf_pd(d, x); }, 0.0, 1.0, 20000);
  EXPECT_NEAR(expect_pd(d), ref, 2e-6);
}

TEST(ExpectPd, MonteCarloMean) {
  const double mu = 1.07 * kS.sigma_w2;
  const auto samples = sample_pd(mu, 2e-3, 3e-3, 200000, 5);
  double mean = 0, ss = 0;
  for (double v : samples) mean += v;
  mean /= samples.size();
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (samples.size() - 1) / samples.size());
  EXPECT_NEAR(expect_pd(pd_at(mu, 2e-3, 3e-3)), mean, 3.0 * se);
}

TEST(ExpectPd, LongEstimationCollapsesToTruePd) {
  const double mu = threshold_90(1e-3);
  EXPECT_NEAR(expect_pd(pd_at(mu, 100.0, 1e-3)), 0.9, 2e-3);
}

TEST(ExpectPd, OutageThresholdKeepsMeanAboveTarget) {
  const double mu = solve_threshold_outage(kS, kD, 5e-3, 1e-3);
  EXPECT_GT(expect_pd(pd_at(mu, 5e-3, 1e-3)), 0.9);
}

TEST(GammaParams, Table2Values) {
  const GammaApprox g = gamma_params(kS, kD);
  EXPECT_NEAR(g.a2, 500.0, 1e-12);
  EXPECT_NEAR(g.b2, 2.0 * 1.1 / 1000.0, 1e-15);
  // mean and variance of |h_hat|^2 P_tx / sigma^2 from the noncentral chi-squared moments
  const double v = kS.sigma_w2 / (2.0 * kS.N_s);
  const double mean = (v + kS.h_s_gain) * kS.P_tx_ST / kS.sigma_w2;
  const double var = (2 * v * v + 4 * v * kS.h_s_gain) * std::pow(kS.P_tx_ST / kS.sigma_w2, 2);
  EXPECT_NEAR(g.a1 * g.b1 / mean, 1.0, 1e-12);
  EXPECT_NEAR(g.a1 * g.b1 * g.b1 / var, 1.0, 1e-12);
}

TEST(GammaParams, MomentsMatchSampledSnr) {
  const GammaApprox g = gamma_params(kS, kD);
  const auto batch = mc::sample_estimates(kS, kD, 5e-3, 400000, 3);
  std::vector<double> e1(batch.h_hat.size());
  for (std::size_t i = 0; i < e1.size(); ++i) e1[i] = batch.h_hat[i] * batch.h_hat[i] * kS.P_tx_ST / kS.sigma_w2;
  const auto m = mc::mean_and_error(e1);
  EXPECT_NEAR(m.mean, g.a1 * g.b1, 3.0 * m.std_error);
}

TEST(CapacityPdf, Normalization) {
  for (double gs : {-10.0, 0.0, 10.0}) {
    for (double gp2 : {-10.0, 0.0, 10.0}) {
      const Scenario s = with_gamma_p2_db(with_gamma_s_db(kS, gs), gp2);
      const GammaApprox g = gamma_params(s, derive(s));
      EXPECT_NEAR(total_mass({CapacityKind::C0, g}), 1.0, 1e-6) << gs;
      EXPECT_NEAR(total_mass({CapacityKind::C1, g}), 1.0, 1e-4) << gs << ' ' << gp2;
    }
  }
}

TEST(CapacityPdf, C1DensityMatchesRatioFormula) {
  const GammaApprox g = gamma_params(kS, kD);
  // Ratio density written in the original (unreduced) form, evaluated in logs.
  auto ref = [&](double x) {
    const double z = std::exp2(x) - 1.0;
    const double log_f = std::lgamma(g.a1 + g.a2) - std::lgamma(g.a1) - std::lgamma(g.a2) -
                         g.a1 * std::log(g.b1) - g.a2 * std::log(g.b2) + (g.a1 - 1) * std::log(z) -
                         (g.a1 + g.a2) * std::log(1.0 / g.b2 + z / g.b1);
    return std::exp(log_f) * std::exp2(x) * std::log(2.0);
  };
  for (double x : {3.2, 3.3, 3.334, 3.36, 3.45}) {
    EXPECT_NEAR(pdf_c1(g, x) / ref(x), 1.0, 1e-5) << x;
  }
}

TEST(CapacityCdf, C0OrderedInAccessSnr) {
  const std::vector<double> xs = numeric::linspace(0.5, 5.0, 40);
  std::vector<std::vector<double>> cdfs;
  for (double gs : {-10.0, 0.0, 10.0}) {
    const Scenario s = with_gamma_s_db(kS, gs);
    cdfs.push_back(cdf_sorted({CapacityKind::C0, gamma_params(s, derive(s))}, xs));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_GE(cdfs[0][i], cdfs[1][i]);
    EXPECT_GE(cdfs[1][i], cdfs[2][i]);
  }
}

TEST(CapacityCdf, C1ShiftsLeftWithInterference) {
  const std::vector<double> xs = numeric::linspace(0.05, 4.0, 40);
  std::vector<std::vector<double>> cdfs;
  for (double gp2 : {-10.0, 0.0, 10.0}) {
    const Scenario s = with_gamma_p2_db(kS, gp2);
    cdfs.push_back(cdf_sorted({CapacityKind::C1, gamma_params(s, derive(s))}, xs));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_LE(cdfs[0][i], cdfs[1][i] + 1e-9);
    EXPECT_LE(cdfs[1][i], cdfs[2][i] + 1e-9);
  }
}

TEST(CapacityCdf, AgreesWithIndependentSampler) {
  const GammaApprox g = gamma_params(kS, kD);
  std::mt19937_64 gen(99);
  std::normal_distribution<double> h(std::sqrt(kS.h_s_gain), std::sqrt(kS.sigma_w2 / (2.0 * kS.N_s)));
  std::chi_squared_distribution<double> chi(kS.N_p2);
  std::vector<double> c0(100000), c1(100000);
  for (std::size_t i = 0; i < c0.size(); ++i) {
    const double hh = h(gen);
    const double e1 = hh * hh * kS.P_tx_ST / kS.sigma_w2;
    const double e2 = kD.P_rx_SR * chi(gen) / kS.N_p2 / kS.sigma_w2;
    c0[i] = std::log2(1 + e1);
    c1[i] = std::log2(1 + e1 / e2);
  }
  const CapacityDistribution d0{CapacityKind::C0, g};
  const CapacityDistribution d1{CapacityKind::C1, g};
  std::vector<double> s1 = c1;
  std::sort(s1.begin(), s1.end());
  const auto f1 = cdf_sorted(d1, s1);
  EXPECT_LT(ks_against(c0, [&](double x) { return cdf(d0, x); }), 0.015);
  EXPECT_LT(mc::ks_distance_sorted(s1, f1), 0.015);
}

TEST(ExpectCapacity, C0AgainstMonteCarloAndTrueValue) {
  const ThroughputModel m(kS);
  const auto batch = mc::sample_estimates(kS, kD, 5e-3, 400000, 8);
  const auto est = mc::mean_and_error(batch.samples_c0);
  EXPECT_NEAR(m.mean_c0, est.mean, 3.0 * est.std_error);
  EXPECT_NEAR(m.mean_c0, m.c0, 1e-3);
}

TEST(ExpectCapacity, ManyPilotsApproachTrueCapacity) {
  Scenario s = kS;
  s.N_s = 100000;
  const GammaApprox g = gamma_params(s, derive(s));
  EXPECT_NEAR(expect_capacity({CapacityKind::C0, g}), std::log2(1.0 + derive(s).gamma_s), 1e-5);
}

TEST(ExpectCapacity, ZeroAccessGainIsSmallAndNonNegative) {
  Scenario s = kS;
  s.h_s_gain = 0.0;
  const GammaApprox g = gamma_params(s, derive(s));
  const double e = expect_capacity({CapacityKind::C0, g});
  EXPECT_GE(e, 0.0);
  EXPECT_LT(e, 0.1);
}
