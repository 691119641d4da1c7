#ifndef COGSENSE_DETECTOR_HPP_
#define COGSENSE_DETECTOR_HPP_

// Energy detector operating characteristics. The test statistic averages
// tau_sen * f_s squared real Gaussian samples, so it is P_rx / (N/2) times a
// Gamma(N/2) variate and the exceedance probability of a threshold mu is
// Q(N/2, N mu / (2 P_rx)). N may be non-integer here.

#include <cmath>
#include <string>

#include "cogsense/errors.hpp"
#include "cogsense/specfun.hpp"

namespace cogsense::detector {

/// Gamma shape of a statistic averaged over duration * f_s real samples.
inline double half_dof(double duration, double f_s) { return 0.5 * duration * f_s; }

namespace detail {

inline void check(const char* who, double mu, double tau_sen, double power, double f_s) {
  if (!(mu > 0.0) || !(tau_sen > 0.0) || !(power > 0.0) || !(f_s > 0.0) ||
      tau_sen * f_s < 1.0) {
    throw DomainError(std::string(who) +
                      ": need mu > 0, power > 0 and at least one sample (tau_sen * f_s >= 1)");
  }
}

}  // namespace detail

/// Probability that the statistic exceeds mu when its expected value is `power`.
inline double exceedance(double mu, double tau_sen, double power, double f_s) {
  const double a = half_dof(tau_sen, f_s);
  return specfun::reg_upper_gamma(a, a * mu / power);
}

inline double prob_detection(double mu, double tau_sen, double P_rx, double f_s) {
  detail::check("prob_detection", mu, tau_sen, P_rx, f_s);
  return exceedance(mu, tau_sen, P_rx, f_s);
}

inline double prob_false_alarm(double mu, double tau_sen, double sigma_w2, double f_s) {
  detail::check("prob_false_alarm", mu, tau_sen, sigma_w2, f_s);
  return exceedance(mu, tau_sen, sigma_w2, f_s);
}

/// Threshold at which prob_detection equals p.
inline double threshold_for_pd(double p, double tau_sen, double P_rx, double f_s) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("threshold_for_pd: p must lie in (0,1)");
  if (!(tau_sen > 0.0) || !(P_rx > 0.0) || !(f_s > 0.0) || tau_sen * f_s < 1.0) {
    throw DomainError("threshold_for_pd: need P_rx > 0 and tau_sen * f_s >= 1");
  }
  const double a = half_dof(tau_sen, f_s);
  return specfun::inv_reg_upper_gamma(p, a) * P_rx / a;
}

}  // namespace cogsense::detector

#endif  // COGSENSE_DETECTOR_HPP_
