#ifndef COGSENSE_NUMERIC_HPP_
#define COGSENSE_NUMERIC_HPP_

// Small numerical toolkit: adaptive Gauss-Kronrod quadrature, Brent's root
// finder, golden-section maximization, monotone cubic interpolation and a
// deterministic parallel map.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <queue>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "cogsense/errors.hpp"

namespace cogsense::numeric {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  int max_panels = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel kronrod_panel(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive G7/K15 quadrature of f over the consecutive intervals
/// delimited by `breaks` (sorted, at least two points). The worst panel is
/// bisected until the summed error estimate meets max(abs_tol, rel_tol*|I|).
template <class F>
QuadratureResult integrate(F&& f, std::span<const double> breaks,
                           const QuadratureOptions& options = {}) {
  if (breaks.size() < 2) throw DomainError("integrate: need at least two break points");
  std::priority_queue<detail::Panel> panels;
  QuadratureResult result;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    panels.push(detail::kronrod_panel(f, breaks[i], breaks[i + 1]));
    result.evaluations += 15;
  }
  auto totals = [&panels] {
    auto copy = panels;
    std::pair<double, double> sum{0.0, 0.0};
    while (!copy.empty()) {
      sum.first += copy.top().value;
      sum.second += copy.top().error;
      copy.pop();
    }
    return sum;
  };
  if (panels.empty()) {
    result.converged = true;
    return result;
  }
  double value = 0.0;
  double error = 0.0;
  std::tie(value, error) = totals();
  int count = static_cast<int>(panels.size());
  while (error > std::max(options.abs_tol, options.rel_tol * std::abs(value))) {
    if (count >= options.max_panels) {
      result.value = value;
      result.abs_error = error;
      return result;
    }
    const detail::Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval exhausted at machine precision; accept what we have.
      panels.push({worst.lo, worst.hi, worst.value, 0.0});
      std::tie(value, error) = totals();
      continue;
    }
    const detail::Panel left = detail::kronrod_panel(f, worst.lo, mid);
    const detail::Panel right = detail::kronrod_panel(f, mid, worst.hi);
    result.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
    if (count % 64 == 0) std::tie(value, error) = totals();  // limit drift
  }
  std::tie(value, error) = totals();
  result.value = value;
  result.abs_error = error;
  result.converged = true;
  return result;
}

/// As `integrate`, but non-convergence raises ConvergenceError.
template <class F>
double integrate_or_throw(F&& f, std::span<const double> breaks,
                          const QuadratureOptions& options = {}) {
  const QuadratureResult r = integrate(std::forward<F>(f), breaks, options);
  if (!r.converged) {
    throw ConvergenceError("quadrature did not reach tolerance (error estimate " +
                           std::to_string(r.abs_error) + ")");
  }
  return r.value;
}

/// Brent's method for f(x) = 0 on [lo, hi] given f(lo) and f(hi) of opposite sign.
template <class F>
double brent_root(F&& f, double lo, double hi, double f_lo, double f_hi, double x_tol,
                  int max_iter = 200) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) throw DomainError("brent_root: root is not bracketed");
  double a = lo, b = hi, fa = f_lo, fb = f_hi;
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * 2.220446049250313e-16 * std::abs(b) + 0.5 * x_tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  throw ConvergenceError("brent_root: iteration limit reached");
}

struct Extremum {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// The returned point is the best evaluated point, endpoints included.
template <class F>
Extremum golden_section_maximize(F&& f, double lo, double hi, double x_tol) {
  constexpr double kInvPhi = 0.6180339887498948482;
  Extremum best{lo, f(lo)};
  if (const double fh = f(hi); fh > best.value) best = {hi, fh};
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > x_tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  if (f1 > best.value) best = {x1, f1};
  if (f2 > best.value) best = {x2, f2};
  return best;
}

/// n points evenly spaced on [lo, hi], endpoints included (n >= 2).
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

/// Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Arguments outside the nodes are clamped to the end values.
class Pchip {
 public:
  Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw DomainError("Pchip: need at least two aligned nodes");
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      if (!(h[i] > 0.0)) throw DomainError("Pchip: nodes must be strictly increasing");
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    slope_.assign(n, 0.0);
    if (n == 2) {
      slope_[0] = slope_[1] = delta[0];
      return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) continue;
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    slope_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    slope_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  double operator()(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const std::size_t i =
        static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double s = (t - x_[i]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * y_[i] + (s3 - 2.0 * s2 + s) * h * slope_[i] +
           (-2.0 * s3 + 3.0 * s2) * y_[i + 1] + (s3 - s2) * h * slope_[i + 1];
  }

 private:
  static double end_slope(double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0.0) return 0.0;
    if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0)) d = 3.0 * d0;
    return d;
  }

  std::vector<double> x_, y_, slope_;
};

inline unsigned worker_count(std::size_t jobs) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(hw, std::max<std::size_t>(jobs, 1)));
}

/// Evaluates fn(0..n-1) across worker threads. Results land in index order,
/// so the output never depends on scheduling. The first exception is rethrown.
template <class F>
auto parallel_map(std::size_t n, F&& fn) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(n);
  const unsigned workers = worker_count(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          out[i] = fn(i);
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace cogsense::numeric

#endif  // COGSENSE_NUMERIC_HPP_
