#ifndef COGSENSE_MONTECARLO_HPP_
#define COGSENSE_MONTECARLO_HPP_

// Simulation oracle for the estimation model. Trials are split into blocks of
// kBlockSize; block b draws from xoshiro256++ seeded by splitmix64 over
// (seed, b), so batches are bit-identical regardless of thread count.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cogsense/detector.hpp"
#include "cogsense/errors.hpp"
#include "cogsense/numeric.hpp"
#include "cogsense/radio_model.hpp"
#include "cogsense/specfun.hpp"

namespace cogsense::mc {

inline constexpr const char* kRngId = "xoshiro256pp-splitmix64-v1";
inline constexpr std::size_t kBlockSize = 1024;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256++ 1.0.
class Rng {
 public:
  using result_type = std::uint64_t;

  /// Stream `stream` of master seed `seed`.
  Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t sm = seed;
    const std::uint64_t mixed = splitmix64(sm) ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    std::uint64_t st = mixed;
    for (auto& word : s_) word = splitmix64(st);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = std::rotl(s_[3], 45);
    return result;
  }

  /// Uniform on (0, 1), 53-bit resolution, never exactly 0.
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Standard normal variate (Marsaglia polar method, one value per call).
inline double normal(Rng& rng) {
  for (;;) {
    const double u = 2.0 * rng.uniform() - 1.0;
    const double v = 2.0 * rng.uniform() - 1.0;
    const double r2 = u * u + v * v;
    if (r2 > 0.0 && r2 < 1.0) return u * std::sqrt(-2.0 * std::log(r2) / r2);
  }
}

/// Gamma(shape, 1) variate (Marsaglia-Tsang; shape < 1 boosted via U^(1/shape)).
inline double gamma(Rng& rng, double shape) {
  if (!(shape > 0.0)) throw DomainError("gamma sampler: shape must be positive");
  if (shape < 1.0) {
    const double g = gamma(rng, shape + 1.0);
    return g * std::pow(rng.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// Runs fill(rng, first, last) over kBlockSize-trial blocks, one stream per block.
template <class Fill>
void for_each_block(std::size_t trials, std::uint64_t seed, Fill&& fill) {
  const std::size_t blocks = (trials + kBlockSize - 1) / kBlockSize;
  numeric::parallel_map(blocks, [&](std::size_t b) {
    Rng rng(seed, b);
    const std::size_t first = b * kBlockSize;
    fill(rng, first, std::min(trials, first + kBlockSize));
    return 0;
  });
}

/// Integer sample count used by the simulator for a duration (at least one).
inline long sample_count(double duration, double f_s) {
  return std::max(1L, std::lround(duration * f_s));
}

struct TrialBatch {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::string rng_id = kRngId;
  long est_samples = 0;         // rounded tau_est * f_s
  bool est_samples_rounded = false;
  std::vector<double> p_hat;    // estimated received power at the ST [W]
  std::vector<double> h_hat;    // estimated access channel amplitude
  std::vector<double> p_sr_hat; // estimated received power at the SR [W]
  std::vector<double> samples_pd;  // filled by evaluate_detection
  std::vector<double> samples_c0;
  std::vector<double> samples_c1;
  std::vector<double> samples_tau_sen;  // filled in corollary mode
};

/// Draws the three channel estimates per trial and the capacities they imply.
///   P_hat    = P_rx_ST * chi2(N_est) / N_est
///   h_hat    ~ N(sqrt(h_s_gain), sigma_w2 / (2 N_s))
///   P_hat_SR = P_rx_SR * chi2(N_p2) / N_p2
inline TrialBatch sample_estimates(const Scenario& s, const DerivedPowers& d, double tau_est,
                                   std::size_t trials, std::uint64_t seed) {
  validate(s);
  if (trials < 1) throw DomainError("sample_estimates: need at least one trial");
  if (!(tau_est > 0.0)) throw DomainError("sample_estimates: tau_est must be positive");
  TrialBatch batch;
  batch.seed = seed;
  batch.trials = trials;
  batch.est_samples = sample_count(tau_est, s.f_s);
  batch.est_samples_rounded = static_cast<double>(batch.est_samples) != tau_est * s.f_s;
  batch.p_hat.resize(trials);
  batch.h_hat.resize(trials);
  batch.p_sr_hat.resize(trials);
  batch.samples_c0.resize(trials);
  batch.samples_c1.resize(trials);
  const double a_est = 0.5 * static_cast<double>(batch.est_samples);
  const double a_sr = 0.5 * s.N_p2;
  const double h_mean = std::sqrt(s.h_s_gain);
  const double h_sd = std::sqrt(s.sigma_w2 / (2.0 * s.N_s));
  for_each_block(trials, seed, [&](Rng& rng, std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) {
      batch.p_hat[i] = d.P_rx_ST * gamma(rng, a_est) / a_est;
      batch.h_hat[i] = h_mean + h_sd * normal(rng);
      batch.p_sr_hat[i] = d.P_rx_SR * gamma(rng, a_sr) / a_sr;
      const double e1 = batch.h_hat[i] * batch.h_hat[i] * s.P_tx_ST / s.sigma_w2;
      const double e2 = batch.p_sr_hat[i] / s.sigma_w2;
      batch.samples_c0[i] = std::log2(1.0 + e1);
      batch.samples_c1[i] = std::log2(1.0 + e1 / e2);
    }
  });
  return batch;
}

/// Per-trial detection probability at threshold mu when the estimate P_hat
/// stands in for the received power.
inline void evaluate_detection(TrialBatch& batch, double mu, double tau_sen, double f_s) {
  batch.samples_pd.resize(batch.p_hat.size());
  for (std::size_t i = 0; i < batch.p_hat.size(); ++i) {
    batch.samples_pd[i] = detector::prob_detection(mu, tau_sen, batch.p_hat[i], f_s);
  }
}

/// Energy-detector test statistic: average of round(tau_sen f_s) squared
/// Gaussian samples of total power `power`.
inline std::vector<double> sample_test_statistic(double power, double tau_sen, double f_s,
                                                 std::size_t trials, std::uint64_t seed) {
  if (!(power > 0.0)) throw DomainError("sample_test_statistic: power must be positive");
  const double a = 0.5 * static_cast<double>(sample_count(tau_sen, f_s));
  std::vector<double> out(trials);
  for_each_block(trials, seed, [&](Rng& rng, std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) out[i] = power * gamma(rng, a) / a;
  });
  return out;
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MeanEstimate mean_and_error(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean_and_error: empty sample");
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  const double var = xs.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

/// Right-continuous step CDF of a sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::span<const double> samples) : sorted_(samples.begin(), samples.end()) {
    if (sorted_.empty()) throw DomainError("empirical CDF of an empty sample");
    std::sort(sorted_.begin(), sorted_.end());
  }

  double operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }

  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

inline std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> samples,
                                                            std::span<const double> grid) {
  const EmpiricalCdf ecdf(samples);
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (const double x : grid) out.emplace_back(x, ecdf(x));
  return out;
}

/// sup |F_hat - F| given the sorted sample, F at each sorted point and the
/// left limit F(x-) there. Both sides of every jump are checked; the left
/// limit matters where the sampled variate saturates (e.g. P_d rounding to 1).
inline double ks_distance_sorted(std::span<const double> sorted, std::span<const double> analytic_at_sorted,
                                 std::span<const double> analytic_left_limit) {
  if (sorted.size() != analytic_at_sorted.size() || sorted.size() != analytic_left_limit.size() ||
      sorted.empty()) {
    throw DomainError("ks_distance: sample and CDF values must be non-empty and aligned");
  }
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    d = std::max({d, std::abs(analytic_left_limit[i] - static_cast<double>(i) / n),
                  std::abs(static_cast<double>(j) / n - analytic_at_sorted[i])});
    i = j;
  }
  return d;
}

/// Same, for an analytic CDF without atoms at the sample points.
inline double ks_distance_sorted(std::span<const double> sorted, std::span<const double> analytic_at_sorted) {
  return ks_distance_sorted(sorted, analytic_at_sorted, analytic_at_sorted);
}

/// Points just below each sorted value, for left limits of a CDF.
inline std::vector<double> left_neighbours(std::span<const double> sorted) {
  std::vector<double> out(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out[i] = std::nextafter(sorted[i], -std::numeric_limits<double>::infinity());
  }
  return out;
}

inline double ks_distance(std::span<const double> samples,
                          const std::function<double(double)>& analytic_cdf) {
  const EmpiricalCdf ecdf(samples);
  const auto& sorted = ecdf.sorted();
  const std::vector<double> below = left_neighbours(sorted);
  std::vector<double> f(sorted.size());
  std::vector<double> f_left(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    f[i] = analytic_cdf(sorted[i]);
    f_left[i] = analytic_cdf(below[i]);
  }
  return ks_distance_sorted(sorted, f, f_left);
}

}  // namespace cogsense::mc

#endif  // COGSENSE_MONTECARLO_HPP_
