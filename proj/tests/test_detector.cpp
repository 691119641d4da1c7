#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cogsense/detector.hpp"
#include "cogsense/radio_model.hpp"
#include "oracles.hpp"

using namespace cogsense;
using detector::prob_detection;
using detector::prob_false_alarm;
using detector::threshold_for_pd;

namespace {
const Scenario kS = table2();
const DerivedPowers kD = derive(kS);
}  // namespace

TEST(ProbDetection, ReducesToFalseAlarmAtNoisePower) {
  for (double mu_rel : {0.9, 1.0, 1.05}) {
    const double mu = mu_rel * kS.sigma_w2;
    EXPECT_EQ(prob_detection(mu, 1e-3, kS.sigma_w2, kS.f_s), prob_false_alarm(mu, 1e-3, kS.sigma_w2, kS.f_s));
  }
}

TEST(ProbDetection, TinyThresholdDetectsAlways) {
  EXPECT_NEAR(prob_detection(1e-30, 1e-3, kD.P_rx_ST, kS.f_s), 1.0, 1e-15);
}

TEST(ProbFalseAlarm, TwoSamplesAtNoisePower) {
  EXPECT_NEAR(prob_false_alarm(kS.sigma_w2, 2.0 / kS.f_s, kS.sigma_w2, kS.f_s), std::exp(-1.0), 1e-14);
}

TEST(ProbFalseAlarm, HugeThresholdNeverFires) {
  EXPECT_EQ(prob_false_alarm(1e3 * kS.sigma_w2, 1e-3, kS.sigma_w2, kS.f_s), 0.0);
}

TEST(ProbFalseAlarm, ThousandSamplesAgainstQuadrature) {
  const double p = prob_false_alarm(1.1 * kS.sigma_w2, 1000.0 / kS.f_s, kS.sigma_w2, kS.f_s);
  // chi-squared(1000) survival at 1100 == Q(500, 550)
  EXPECT_NEAR(p / oracle::upper_gamma_by_quadrature(500.0, 550.0), 1.0, 1e-8);
}

TEST(ProbDetection, MonteCarloAtTenPercentFalseAlarm) {
  // Energy detector on raw real Gaussian samples (variance = received power).
  const double tau = 1e-4;  // 100 samples
  const int n_samples = 100;
  const double mu = threshold_for_pd(0.1, tau, kS.sigma_w2, kS.f_s);  // P_fa = 0.1
  const double pd = prob_detection(mu, tau, kD.P_rx_ST, kS.f_s);
  const int trials = 200000;
  std::mt19937_64 gen(2024);
  std::normal_distribution<double> z(0.0, 1.0);
  auto rate = [&](double power) {
    const double sd = std::sqrt(power);
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
      double acc = 0.0;
      for (int k = 0; k < n_samples; ++k) {
        const double y = sd * z(gen);
        acc += y * y;
      }
      hits += acc / n_samples > mu;
    }
    return static_cast<double>(hits) / trials;
  };
  EXPECT_NEAR(rate(kD.P_rx_ST), pd, 3.0 * std::sqrt(pd * (1 - pd) / trials));
  EXPECT_NEAR(rate(kS.sigma_w2), 0.1, 3.0 * std::sqrt(0.09 / trials));
}

TEST(ThresholdForPd, MatchesBisection) {
  const double tau = 1e-3;
  const double mu = threshold_for_pd(0.9, tau, kD.P_rx_ST, kS.f_s);
  const double ref = oracle::bisect(
      [&](double m) { return oracle::boost_q(500.0, 500.0 * m / kD.P_rx_ST) - 0.9; }, 0.5 * kD.P_rx_ST,
      1.5 * kD.P_rx_ST);
  EXPECT_NEAR(mu / ref, 1.0, 1e-9);
}

TEST(ThresholdForPd, RoundTrip) {
  for (double p : {1e-6, 0.1, 0.5, 0.9, 0.999999}) {
    for (double tau : {1e-6, 1e-3, 5e-3, 0.1}) {
      const double mu = threshold_for_pd(p, tau, kD.P_rx_ST, kS.f_s);
      EXPECT_NEAR(prob_detection(mu, tau, kD.P_rx_ST, kS.f_s), p, 1e-9) << p << ' ' << tau;
    }
  }
}

TEST(ThresholdForPd, MedianNearReceivedPowerForManySamples) {
  const double tau = 0.1;  // 1e5 samples
  const double mu = threshold_for_pd(0.5, tau, kD.P_rx_ST, kS.f_s);
  // Median of Gamma(a)/a is about 1 - 1/(3a).
  const double a = 5e4;
  EXPECT_NEAR(mu / kD.P_rx_ST, 1.0, 1e-4);
  EXPECT_NEAR(mu / kD.P_rx_ST, oracle::boost_q_inv(a, 0.5) / a, 1e-12);
}

TEST(Detector, StrictlyDecreasingInThreshold) {
  for (double tau : {1e-4, 1e-3, 1e-2}) {
    double prev_pd = 2.0, prev_pfa = 2.0;
    for (double r = 0.9; r <= 1.25; r += 0.01) {
      const double pd = prob_detection(r * kS.sigma_w2, tau, kD.P_rx_ST, kS.f_s);
      const double pfa = prob_false_alarm(r * kS.sigma_w2, tau, kS.sigma_w2, kS.f_s);
      if (prev_pd > 1e-300 && prev_pd < 1.0) EXPECT_LT(pd, prev_pd);
      if (prev_pfa > 1e-300 && prev_pfa < 1.0) EXPECT_LT(pfa, prev_pfa);
      EXPECT_GE(pd, pfa);
      prev_pd = pd;
      prev_pfa = pfa;
    }
  }
}

TEST(Detector, IncreasingInReceivedPower) {
  const double mu = 1.05 * kS.sigma_w2;
  EXPECT_LT(prob_detection(mu, 1e-3, 1.0 * kS.sigma_w2, kS.f_s), prob_detection(mu, 1e-3, 1.1 * kS.sigma_w2, kS.f_s));
}

TEST(Detector, DomainErrors) {
  EXPECT_THROW(prob_detection(0.0, 1e-3, kD.P_rx_ST, kS.f_s), DomainError);
  EXPECT_THROW(prob_detection(1.0, 1e-3, 0.0, kS.f_s), DomainError);
  EXPECT_THROW(prob_false_alarm(1.0, 0.5e-6, kS.sigma_w2, kS.f_s), DomainError);
  EXPECT_THROW(threshold_for_pd(1.0, 1e-3, kD.P_rx_ST, kS.f_s), DomainError);
  EXPECT_THROW(threshold_for_pd(0.0, 1e-3, kD.P_rx_ST, kS.f_s), DomainError);
}
