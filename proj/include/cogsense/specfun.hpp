#ifndef COGSENSE_SPECFUN_HPP_
#define COGSENSE_SPECFUN_HPP_

// Log-gamma, regularized incomplete gamma functions and their inverses.
//
// Q(a, x) = Γ(a, x) / Γ(a) is the regularized upper incomplete gamma
// function and P(a, x) = 1 - Q(a, x) its lower counterpart. Every routine
// works in the log domain so that shapes up to ~1e6 (degrees of freedom of
// energy detectors with 10^6 samples) remain accurate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cogsense/errors.hpp"

namespace cogsense::specfun {

namespace detail {

inline constexpr double kLogSqrtTwoPi = 0.91893853320467274178032973640562;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr double kTiny = 1e-300;
inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr long kMaxTerms = 10'000'000;

// lgamma(z) - [(z - 1/2) ln z - z + ln sqrt(2 pi)] for z >= 15.
inline double stirling_series(double z) {
  const double r = 1.0 / z;
  const double r2 = r * r;
  return r * (1.0 / 12.0 -
              r2 * (1.0 / 360.0 -
                    r2 * (1.0 / 1260.0 - r2 * (1.0 / 1680.0 - r2 * (1.0 / 1188.0)))));
}

}  // namespace detail

/// ln Γ(x) for x > 0. Pure; unlike std::lgamma it never touches `signgam`.
inline double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
  }
  if (std::isinf(x)) return detail::kInf;
  double z = x;
  double product = 1.0;
  while (z < 15.0) {
    product *= z;
    z += 1.0;
  }
  return (z - 0.5) * std::log(z) - z + detail::kLogSqrtTwoPi + detail::stirling_series(z) -
         std::log(product);
}

/// Remainder of Stirling's approximation: ln Γ(a) - [(a - 1/2) ln a - a + ln sqrt(2 pi)].
inline double stirling_remainder(double a) {
  if (a >= 15.0) return detail::stirling_series(a);
  return log_gamma(a) - ((a - 0.5) * std::log(a) - a + detail::kLogSqrtTwoPi);
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) - ln Γ(a + b), arranged so that the large
/// Stirling terms cancel analytically instead of numerically.
inline double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("log_beta: arguments must be positive");
  if (a < b) std::swap(a, b);
  return -(a - 0.5) * std::log1p(b / a) - b * std::log(a + b) + (b - 0.5) * std::log(b) +
         detail::kLogSqrtTwoPi + stirling_remainder(a) + stirling_remainder(b) -
         stirling_remainder(a + b);
}

/// t - ln(1 + t) for t > -1, accurate near t = 0.
inline double log1pmx(double t) {
  if (std::abs(t) < 0.5) {
    // ln(1+t) = 2 atanh(r), r = t / (2 + t); t - 2r = r t.
    const double r = t / (2.0 + t);
    const double r2 = r * r;
    double power = r * r2;
    double tail = 0.0;
    for (int k = 3; k < 80; k += 2) {
      const double term = power / k;
      tail += term;
      if (std::abs(term) <= std::abs(tail) * detail::kEps) break;
      power *= r2;
    }
    return r * t - 2.0 * tail;
  }
  return t - std::log1p(t);
}

/// ln(x^a e^{-x} / Γ(a)), the common prefactor of P, Q and the Gamma density.
inline double log_gamma_prefix(double a, double x) {
  if (x == 0.0) return -detail::kInf;
  if (a < 10.0) return a * std::log(x) - x - log_gamma(a);
  const double t = (x - a) / a;
  return -a * log1pmx(t) + 0.5 * std::log(a / detail::kTwoPi) - stirling_remainder(a);
}

/// Density of Gamma(shape a, scale 1) at x.
inline double gamma_density(double a, double x) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) return a < 1.0 ? std::numeric_limits<double>::infinity() : (a == 1.0 ? 1.0 : 0.0);
  return std::exp(log_gamma_prefix(a, x)) / x;
}

namespace detail {

inline void check_gamma_args(const char* who, double a, double x) {
  if (!(a > 0.0) || std::isnan(x) || x < 0.0) {
    throw DomainError(std::string(who) + ": need a > 0 and x >= 0 (a=" + std::to_string(a) +
                      ", x=" + std::to_string(x) + ")");
  }
}

// P(a, x) by its power series; intended for x < a + 1.
inline double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (long n = 1; n < kMaxTerms; ++n) {
    term *= x / (a + static_cast<double>(n));
    sum += term;
    if (term <= sum * kEps) return sum * std::exp(log_gamma_prefix(a, x));
  }
  throw ConvergenceError("incomplete gamma series did not converge");
}

// Q(a, x) by Legendre's continued fraction (modified Lentz); intended for x >= a + 1.
inline double upper_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (long i = 1; i < kMaxTerms; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) <= kEps) return std::exp(log_gamma_prefix(a, x)) * h;
  }
  throw ConvergenceError("incomplete gamma continued fraction did not converge");
}

}  // namespace detail

/// Regularized upper incomplete gamma function Q(a, x).
inline double reg_upper_gamma(double a, double x) {
  detail::check_gamma_args("reg_upper_gamma", a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::lower_series(a, x);
  return detail::upper_fraction(a, x);
}

/// Regularized lower incomplete gamma function P(a, x) = 1 - Q(a, x).
inline double reg_lower_gamma(double a, double x) {
  detail::check_gamma_args("reg_lower_gamma", a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return detail::lower_series(a, x);
  return 1.0 - detail::upper_fraction(a, x);
}

/// Standard normal quantile (Acklam's rational approximation, ~1e-9 relative).
/// Only used to seed Newton iterations.
inline double normal_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  if (p <= 0.0) return -detail::kInf;
  if (p >= 1.0) return detail::kInf;
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

namespace detail {

// Solves Q(a, x) = tail (upper == true) or P(a, x) = tail (upper == false) for
// 0 < tail <= 1/2. Newton on the log of the tail, safeguarded by a bracket.
inline double invert_gamma_tail(double tail, bool upper, double a) {
  const double log_target = std::log(tail);
  // Wilson-Hilferty: (X/a)^(1/3) is approximately normal.
  const double z = upper ? -normal_quantile(tail) : normal_quantile(tail);
  const double c = 1.0 / (9.0 * a);
  const double w = 1.0 - c + z * std::sqrt(c);
  double x = a * w * w * w;
  if (!(w > 0.0) || !(x > 1e-3 * a)) {
    // Small-x behaviour P(a, x) ~ x^a / Γ(a + 1).
    const double p_lower = upper ? 1.0 - tail : tail;
    x = std::exp((std::log(p_lower) + log_gamma(a + 1.0)) / a);
    if (!(x > 0.0)) x = kTiny;
  }

  double lo = 0.0;
  double hi = kInf;
  for (int iter = 0; iter < 400; ++iter) {
    const double value = upper ? reg_upper_gamma(a, x) : reg_lower_gamma(a, x);
    const double g = std::log(value) - log_target;
    if (g == 0.0) return x;
    // Q falls and P rises with x.
    const bool x_too_small = upper ? (g > 0.0) : (g < 0.0);
    if (x_too_small) {
      lo = x;
    } else {
      hi = x;
    }
    if (std::isfinite(hi) && hi - lo <= 4.0 * kEps * hi) return 0.5 * (lo + hi);

    double next = std::numeric_limits<double>::quiet_NaN();
    if (std::isfinite(g) && value > 0.0) {
      const double density = std::exp(log_gamma_prefix(a, x)) / x;
      const double slope = (upper ? -density : density) / value;
      if (slope != 0.0 && std::isfinite(slope)) next = x - g / slope;
    }
    if (!(next > lo && next < hi)) {
      if (!std::isfinite(hi)) {
        next = 2.0 * std::max(x, lo) + 1e-300;
      } else if (lo > 0.0) {
        next = std::sqrt(lo * hi);
      } else {
        next = 0.5 * hi;
      }
    }
    if (std::abs(next - x) <= 4.0 * kEps * next) return next;
    x = next;
  }
  throw ConvergenceError("inverse incomplete gamma did not converge");
}

}  // namespace detail

/// x such that Q(a, x) = p. Returns +infinity for p = 0 and 0 for p = 1.
inline double inv_reg_upper_gamma(double p, double a) {
  if (!(a > 0.0) || !(p >= 0.0 && p <= 1.0)) {
    throw DomainError("inv_reg_upper_gamma: need p in [0,1] and a > 0 (p=" + std::to_string(p) +
                      ", a=" + std::to_string(a) + ")");
  }
  if (p == 0.0) return detail::kInf;
  if (p == 1.0) return 0.0;
  if (p <= 0.5) return detail::invert_gamma_tail(p, true, a);
  return detail::invert_gamma_tail(1.0 - p, false, a);
}

/// x such that P(a, x) = p. Returns 0 for p = 0 and +infinity for p = 1.
inline double inv_reg_lower_gamma(double p, double a) {
  if (!(a > 0.0) || !(p >= 0.0 && p <= 1.0)) {
    throw DomainError("inv_reg_lower_gamma: need p in [0,1] and a > 0 (p=" + std::to_string(p) +
                      ", a=" + std::to_string(a) + ")");
  }
  if (p == 0.0) return 0.0;
  if (p == 1.0) return detail::kInf;
  if (p <= 0.5) return detail::invert_gamma_tail(p, false, a);
  return detail::invert_gamma_tail(1.0 - p, true, a);
}

}  // namespace cogsense::specfun

#endif  // COGSENSE_SPECFUN_HPP_
