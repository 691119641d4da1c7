#ifndef COGSENSE_TESTS_ORACLES_HPP_
#define COGSENSE_TESTS_ORACLES_HPP_

// Reference computations that share no code with the library under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Q(a, x) by direct Simpson integration of the Gamma(a) density over [x, x_far].
inline double upper_gamma_by_quadrature(double a, double x) {
  const double sd = std::sqrt(a);
  const double far = std::max(x, a) + 60.0 * sd + 60.0;
  const double lg = std::lgamma(a);
  auto density = [&](double t) {
    return t <= 0.0 ? 0.0 : std::exp((a - 1.0) * std::log(t) - t - lg);
  };
  // Split so the bulk is resolved.
  std::vector<double> cuts{x};
  for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double c = a + k * sd;
    if (c > x && c < far) cuts.push_back(c);
  }
  for (double d = 1.0; x + d < far; d *= 2.0) cuts.push_back(x + d);  // resolve the decay just above x
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(far);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += simpson(density, cuts[i], cuts[i + 1], 4000);
  return total;
}

/// Bisection for the root of a monotone function on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const bool rising = f(hi) > f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) > 0.0) == rising) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

inline double boost_q(double a, double x) { return boost::math::gamma_q(a, x); }
inline double boost_p(double a, double x) { return boost::math::gamma_p(a, x); }
inline double boost_q_inv(double a, double p) { return boost::math::gamma_q_inv(a, p); }

}  // namespace oracle

#endif  // COGSENSE_TESTS_ORACLES_HPP_
