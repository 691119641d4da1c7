#ifndef COGSENSE_DISTRIBUTIONS_HPP_
#define COGSENSE_DISTRIBUTIONS_HPP_

// Distributions of the detection probability and of the secondary capacities
// when the sensing, access and interference channels are estimated.
//
//   P_d  = Q(a_sen, a_sen mu / P_hat), P_hat = P_rx_ST * Gamma(a_est) / a_est
//   C_0  = log2(1 + E1),      E1 ~ Gamma(a1, b1)   (moment-matched access SNR)
//   C_1  = log2(1 + E1 / E2), E2 ~ Gamma(a2, b2)   (SR received power / noise)
//
// with a_est = tau_est f_s / 2 and a_sen = tau_sen f_s / 2.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cogsense/detector.hpp"
#include "cogsense/errors.hpp"
#include "cogsense/numeric.hpp"
#include "cogsense/radio_model.hpp"
#include "cogsense/specfun.hpp"

namespace cogsense {

struct PdDistribution {
  double mu = 0.0;       // threshold [W]
  double tau_sen = 0.0;  // [s]
  double tau_est = 0.0;  // [s]
  double P_rx_ST = 0.0;  // true received power at the ST [W]
  double f_s = 0.0;      // [Hz]
};

inline void validate(const PdDistribution& d) {
  if (!(d.mu > 0.0) || !(d.P_rx_ST > 0.0) || !(d.f_s > 0.0)) {
    throw DomainError("PdDistribution: mu, P_rx_ST and f_s must be positive");
  }
  if (d.tau_est * d.f_s < 1.0 || d.tau_sen * d.f_s < 1.0) {
    throw DomainError("PdDistribution: tau_est and tau_sen must each span at least one sample");
  }
}

/// P(P_d <= x): 1 - Q(a_est, a_est a_sen mu / (P_rx_ST Q^{-1}(x, a_sen))).
inline double cdf_pd(const PdDistribution& d, double x) {
  validate(d);
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("cdf_pd: x must lie in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double a_est = detector::half_dof(d.tau_est, d.f_s);
  const double a_sen = detector::half_dof(d.tau_sen, d.f_s);
  const double y = specfun::inv_reg_upper_gamma(x, a_sen);
  if (y == 0.0) return 1.0;
  return specfun::reg_lower_gamma(a_est, a_est * a_sen * d.mu / (d.P_rx_ST * y));
}

/// E[P_d] = integral over [0,1] of 1 - F_Pd(x).
///
/// Substituting x = Q(a_sen, y) turns the integrand into
/// Q(a_est, K / y) times the Gamma(a_sen) density, K = a_est a_sen mu / P_rx_ST,
/// which removes the inverse gamma function from every quadrature node.
inline double expect_pd(const PdDistribution& d, const numeric::QuadratureOptions& options = {}) {
  validate(d);
  const double a_est = detector::half_dof(d.tau_est, d.f_s);
  const double a_sen = detector::half_dof(d.tau_sen, d.f_s);
  const double k = a_est * a_sen * d.mu / d.P_rx_ST;
  constexpr double kTail = 1e-13;
  const double y_lo = specfun::inv_reg_lower_gamma(kTail, a_sen);
  const double y_hi = specfun::inv_reg_upper_gamma(kTail, a_sen);

  std::vector<double> breaks{y_lo, y_hi};
  const double sd = std::sqrt(a_sen);
  for (const double z : {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0}) breaks.push_back(a_sen + z * sd);
  // Q(a_est, k / y) switches from 0 to 1 around y = k / a_est.
  const double knee = k / a_est;
  for (const double z : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
    breaks.push_back(knee * (1.0 + z / std::sqrt(a_est)));
  }
  std::erase_if(breaks, [&](double b) { return !(b >= y_lo && b <= y_hi); });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto integrand = [&](double y) {
    return specfun::reg_upper_gamma(a_est, k / y) * specfun::gamma_density(a_sen, y);
  };
  const double value = numeric::integrate_or_throw(integrand, breaks, options);
  return std::clamp(value, 0.0, 1.0);
}

/// Gamma(shape, scale) parameters of the access SNR E1 and of E2 = P_hat_SR / sigma_w2.
struct GammaApprox {
  double a1 = 0.0;
  double b1 = 0.0;
  double a2 = 0.0;
  double b2 = 0.0;
};

/// Access SNR |h_hat_s|^2 P_tx_ST / sigma_w2 with h_hat_s ~ N(h_s, sigma_w2 / (2 N_s)) is a
/// scaled noncentral chi-squared (1 dof); a1, b1 match its mean and variance.
/// E2 is exactly Gamma(N_p2 / 2, 2 P_rx_SR / (sigma_w2 N_p2)).
inline GammaApprox gamma_params(const Scenario& s, const DerivedPowers& d) {
  validate(s);
  const double v = s.sigma_w2 / (2.0 * s.N_s);  // estimator variance of h_s
  const double h2 = s.h_s_gain;
  const double scale = s.P_tx_ST / s.sigma_w2;
  const double mean = v + h2;                      // E|h_hat|^2
  const double var = 2.0 * v * v + 4.0 * v * h2;   // Var|h_hat|^2
  GammaApprox g;
  g.a1 = mean * mean / var;
  g.b1 = var / mean * scale;
  g.a2 = 0.5 * s.N_p2;
  g.b2 = 2.0 * d.P_rx_SR / (s.sigma_w2 * s.N_p2);
  return g;
}

/// Density of C_0 at x bits/s/Hz.
inline double pdf_c0(const GammaApprox& g, double x) {
  if (!(x >= 0.0)) return 0.0;
  const double z = std::expm1(x * std::numbers::ln2);
  const double jacobian = std::exp2(x) * std::numbers::ln2;
  if (z <= 0.0) {
    if (g.a1 < 1.0) return std::numeric_limits<double>::infinity();
    return g.a1 == 1.0 ? jacobian / g.b1 : 0.0;
  }
  return jacobian * specfun::gamma_density(g.a1, z / g.b1) / g.b1;
}

/// Density of C_1 at x bits/s/Hz. The ratio E1 / E2 of independent Gamma
/// variates has density
///   Γ(a1+a2) / (Γ(a1) Γ(a2) b1^a1 b2^a2) z^(a1-1) (1/b2 + z/b1)^-(a1+a2),
/// evaluated here through the equivalent beta form w = z b2 / b1.
inline double pdf_c1(const GammaApprox& g, double x) {
  if (!(x >= 0.0)) return 0.0;
  const double z = std::expm1(x * std::numbers::ln2);
  const double jacobian = std::exp2(x) * std::numbers::ln2;
  if (z <= 0.0) {
    if (g.a1 < 1.0) return std::numeric_limits<double>::infinity();
    return g.a1 == 1.0 ? jacobian * g.b2 / (g.b1 * std::exp(specfun::log_beta(g.a1, g.a2))) : 0.0;
  }
  const double ratio = g.b2 / g.b1;
  const double w = z * ratio;
  const double log_fw = -(g.a1 - 1.0) * std::log1p(1.0 / w) - (g.a2 + 1.0) * std::log1p(w) -
                        specfun::log_beta(g.a1, g.a2);
  return jacobian * ratio * std::exp(log_fw);
}

enum class CapacityKind { C0, C1 };

struct CapacityDistribution {
  CapacityKind kind = CapacityKind::C0;
  GammaApprox params;
};

inline double pdf(const CapacityDistribution& c, double x) {
  return c.kind == CapacityKind::C0 ? pdf_c0(c.params, x) : pdf_c1(c.params, x);
}

/// Truncated support [front, back] holding all but ~4e-12 of the mass, with
/// interior break points around the bulk for the quadrature.
inline std::vector<double> capacity_breaks(const CapacityDistribution& c) {
  constexpr double kTail = 1e-12;
  const GammaApprox& g = c.params;
  const double e1_lo = g.b1 * specfun::inv_reg_lower_gamma(kTail, g.a1);
  const double e1_hi = g.b1 * specfun::inv_reg_upper_gamma(kTail, g.a1);
  double z_lo = e1_lo;
  double z_hi = e1_hi;
  double z_c = g.a1 * g.b1;
  double rel = 1.0 / std::sqrt(g.a1);
  if (c.kind == CapacityKind::C1) {
    const double e2_lo = g.b2 * specfun::inv_reg_lower_gamma(kTail, g.a2);
    const double e2_hi = g.b2 * specfun::inv_reg_upper_gamma(kTail, g.a2);
    z_lo = e1_lo / e2_hi;
    z_hi = e1_hi / e2_lo;
    z_c = (g.a1 * g.b1) / (g.a2 * g.b2);
    rel = std::sqrt(1.0 / g.a1 + 1.0 / g.a2);
  }
  std::vector<double> zs{z_lo, z_hi};
  for (const double k : {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0}) zs.push_back(z_c * std::exp(k * rel));
  if (g.a1 < 1.0) {
    // Integrable singularity at zero: geometric ladder towards the origin.
    for (double z = z_lo * 10.0; z < z_c; z *= 10.0) zs.push_back(z);
  }
  std::erase_if(zs, [&](double z) { return !(z >= z_lo && z <= z_hi); });
  std::vector<double> xs;
  xs.reserve(zs.size());
  for (const double z : zs) xs.push_back(std::log1p(z) / std::numbers::ln2);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

/// CDFs at ascending points xs; one pass of cumulative quadrature.
/// C_0 uses the exact Gamma CDF; C_1 integrates its density.
inline std::vector<double> cdf_sorted(const CapacityDistribution& c, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  if (xs.empty()) return out;
  if (!std::is_sorted(xs.begin(), xs.end())) throw DomainError("cdf_sorted: points must ascend");
  if (c.kind == CapacityKind::C0) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      out[i] = x <= 0.0 ? 0.0
                        : specfun::reg_lower_gamma(c.params.a1,
                                                   std::expm1(x * std::numbers::ln2) / c.params.b1);
    }
    return out;
  }
  const std::vector<double> breaks = capacity_breaks(c);
  const double lo = breaks.front();
  const double hi = breaks.back();
  auto density = [&c](double x) { return pdf_c1(c.params, x); };
  numeric::QuadratureOptions options;
  options.abs_tol = 1e-13;
  double acc = 0.0;
  double prev = lo;
  std::size_t next_break = 1;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = std::clamp(xs[i], lo, hi);
    if (x > prev) {
      std::vector<double> segment{prev};
      while (next_break < breaks.size() && breaks[next_break] < x) {
        if (breaks[next_break] > prev) segment.push_back(breaks[next_break]);
        ++next_break;
      }
      segment.push_back(x);
      acc += numeric::integrate(density, segment, options).value;
      prev = x;
    }
    out[i] = xs[i] <= lo ? 0.0 : (xs[i] >= hi ? 1.0 : std::clamp(acc, 0.0, 1.0));
  }
  return out;
}

inline double cdf(const CapacityDistribution& c, double x) {
  const double xs[] = {x};
  return cdf_sorted(c, xs).front();
}

/// Integral of the density over the truncated support (normalization check).
inline double total_mass(const CapacityDistribution& c,
                         const numeric::QuadratureOptions& options = {}) {
  const std::vector<double> breaks = capacity_breaks(c);
  return numeric::integrate_or_throw([&c](double x) { return pdf(c, x); }, breaks, options);
}

/// E[C] = integral of x * pdf(x) over the truncated support.
inline double expect_capacity(const CapacityDistribution& c,
                              const numeric::QuadratureOptions& options = {}) {
  const std::vector<double> breaks = capacity_breaks(c);
  return numeric::integrate_or_throw([&c](double x) { return x * pdf(c, x); }, breaks, options);
}

}  // namespace cogsense

#endif  // COGSENSE_DISTRIBUTIONS_HPP_
