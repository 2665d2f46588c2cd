// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPPCAL_HISTOGRAM_HPP
#define MPPCAL_HISTOGRAM_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mppcal/error.hpp"

namespace mppcal {

inline constexpr std::uint32_t default_k_max = 64;

/// Raw per-trigger photoelectron counts.
class RecordSet {
 public:
  explicit RecordSet(std::vector<std::uint32_t> counts, std::uint32_t k_max = default_k_max)
      : counts_(std::move(counts)), k_max_(k_max) {
    if (counts_.empty()) throw Error(ErrorCode::empty_records, "record set is empty");
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if (counts_[i] > k_max_)
        throw Error(ErrorCode::count_above_cap, "trigger " + std::to_string(i) + " has count " +
                                                    std::to_string(counts_[i]) + " above k_max=" +
                                                    std::to_string(k_max_));
    }
  }

  std::span<const std::uint32_t> counts() const noexcept { return counts_; }
  std::size_t n_triggers() const noexcept { return counts_.size(); }
  std::uint32_t k_max() const noexcept { return k_max_; }

  friend bool operator==(const RecordSet&, const RecordSet&) = default;

 private:
  std::vector<std::uint32_t> counts_;
  std::uint32_t k_max_;
};

/// Integer multiplicity histogram: bins[k] = number of triggers with k counts.
class Histogram {
 public:
  explicit Histogram(std::vector<std::uint64_t> bins) : bins_(std::move(bins)) {
    while (!bins_.empty() && bins_.back() == 0) bins_.pop_back();
    n_triggers_ = std::accumulate(bins_.begin(), bins_.end(), std::uint64_t{0});
    if (n_triggers_ == 0) throw Error(ErrorCode::empty_records, "histogram has no triggers");
  }

  static Histogram from_records(const RecordSet& records) {
    std::vector<std::uint64_t> bins;
    for (std::uint32_t c : records.counts()) {
      if (c >= bins.size()) bins.resize(c + 1, 0);
      ++bins[c];
    }
    return Histogram(std::move(bins));
  }

  std::span<const std::uint64_t> bins() const noexcept { return bins_; }
  std::uint64_t operator[](std::size_t k) const noexcept { return k < bins_.size() ? bins_[k] : 0; }
  std::size_t size() const noexcept { return bins_.size(); }
  std::uint64_t n_triggers() const noexcept { return n_triggers_; }

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  std::vector<std::uint64_t> bins_;
  std::uint64_t n_triggers_ = 0;
};

/// Per-trigger fractions f_k. Bins past size() are zero.
///
/// Measured distributions sum to one. Intermediate quantities (partial
/// distributions, model outputs) may carry any non-negative mass, so the
/// constructor checks only non-negativity and finiteness.
class PhotocountDistribution {
 public:
  PhotocountDistribution() = default;

  explicit PhotocountDistribution(std::vector<double> f, std::uint64_t n_triggers = 0,
                                  bool renormalized = false, double clamped_mass = 0.0)
      : f_(std::move(f)),
        n_triggers_(n_triggers),
        renormalized_(renormalized),
        clamped_mass_(clamped_mass) {
    for (std::size_t k = 0; k < f_.size(); ++k) {
      if (!(f_[k] >= 0.0) || !std::isfinite(f_[k]))
        throw Error(ErrorCode::invalid_argument,
                    "distribution bin " + std::to_string(k) + " is negative or not finite");
    }
  }

  double operator[](std::size_t k) const noexcept { return k < f_.size() ? f_[k] : 0.0; }
  std::span<const double> fractions() const noexcept { return f_; }
  std::size_t size() const noexcept { return f_.size(); }

  /// Trigger count this distribution was measured from; 0 for analytic input.
  std::uint64_t n_triggers() const noexcept { return n_triggers_; }
  bool renormalized() const noexcept { return renormalized_; }
  /// Negative mass removed by clamping during dark subtraction.
  double clamped_mass() const noexcept { return clamped_mass_; }

  double total() const noexcept { return std::accumulate(f_.begin(), f_.end(), 0.0); }

 private:
  std::vector<double> f_;
  std::uint64_t n_triggers_ = 0;
  bool renormalized_ = false;
  double clamped_mass_ = 0.0;
};

inline PhotocountDistribution build_distribution(const Histogram& hist) {
  const double n = static_cast<double>(hist.n_triggers());
  std::vector<double> f(hist.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(hist[k]) / n;
  return PhotocountDistribution(std::move(f), hist.n_triggers());
}

inline PhotocountDistribution build_distribution(const RecordSet& records) {
  return build_distribution(Histogram::from_records(records));
}

/// Sum of k * f_k.
inline double mean_photocounts(const PhotocountDistribution& dist) noexcept {
  double s = 0.0;
  for (std::size_t k = 1; k < dist.size(); ++k) s += static_cast<double>(k) * dist[k];
  return s;
}

/// Sum over k >= 2 of C(k,2) * f_k: pixel-pair coincidences per trigger.
inline double pairwise_coincidence_rate(const PhotocountDistribution& dist) noexcept {
  double s = 0.0;
  for (std::size_t k = 2; k < dist.size(); ++k) {
    const double kk = static_cast<double>(k);
    s += 0.5 * kk * (kk - 1.0) * dist[k];
  }
  return s;
}

/// Normalized second-order correlation estimated from a photocount
/// distribution, treating every pixel pair as one coincidence setup:
/// g2 = 2 * sum C(k,2) f_k / (sum k f_k)^2.
inline double g2(const PhotocountDistribution& dist) {
  const double mean = mean_photocounts(dist);
  if (!(mean > 0.0))
    throw Error(ErrorCode::undefined_statistic, "g2 undefined: zero mean photocounts");
  return 2.0 * pairwise_coincidence_rate(dist) / (mean * mean);
}

struct DarkCalibration {
  double mean_dark = 0.0;    ///< dark counts per trigger, -ln f0
  double p_dc = 0.0;         ///< not clamped; negative values signal estimator noise
  double p_dc_stderr = 0.0;  ///< delta-method 1 sigma; NaN without trigger-count provenance
};

/// Mean dark counts per trigger assuming Poisson dark noise: -ln(f0).
inline double dark_mean(const PhotocountDistribution& dark) {
  if (dark.size() == 0 || !(dark[0] > 0.0))
    throw Error(ErrorCode::saturated_dark, "dark distribution has no zero-count triggers");
  return -std::log(dark[0]);
}

/// Crosstalk probability from the deficit of single-count dark events with
/// respect to the Poisson expectation at the measured dark mean.
///
/// The standard error propagates multinomial bin variances of f0 and f1,
/// including their covariance, through the estimator to first order.
inline DarkCalibration dark_crosstalk_probability(const PhotocountDistribution& dark) {
  const double f0 = dark[0];
  const double f1 = dark[1];
  if (!(f0 > 0.0))
    throw Error(ErrorCode::saturated_dark, "dark distribution has no zero-count triggers");
  if (f0 >= 1.0)
    throw Error(ErrorCode::no_dark_counts, "dark distribution has no dark counts (f0 = 1)");

  const double log_f0 = std::log(f0);
  const double mean = -log_f0;
  const double expected_single = mean * std::exp(-mean);
  const double ratio = f1 / expected_single;

  DarkCalibration cal;
  cal.mean_dark = mean;
  cal.p_dc = 1.0 - ratio;
  if (dark.n_triggers() == 0) {
    cal.p_dc_stderr = std::numeric_limits<double>::quiet_NaN();
    return cal;
  }
  const double n = static_cast<double>(dark.n_triggers());
  const double d_f0 = f1 * (log_f0 + 1.0) / (f0 * f0 * log_f0 * log_f0);
  const double d_f1 = 1.0 / expected_single;
  const double var_f0 = f0 * (1.0 - f0) / n;
  const double var_f1 = f1 * (1.0 - f1) / n;
  const double cov = -f0 * f1 / n;
  const double var = d_f0 * d_f0 * var_f0 + d_f1 * d_f1 * var_f1 + 2.0 * d_f0 * d_f1 * cov;
  cal.p_dc_stderr = std::sqrt(std::max(var, 0.0));
  return cal;
}

enum class SubtractionMode {
  simple,     ///< bin-wise removal of the dark excess above the zero bin
  deconvolve  ///< exact inverse of measured = clean (*) dark
};

inline std::string_view to_string(SubtractionMode mode) noexcept {
  return mode == SubtractionMode::simple ? "simple" : "deconvolve";
}

inline SubtractionMode parse_subtraction_mode(std::string_view s) {
  if (s == "simple") return SubtractionMode::simple;
  if (s == "deconvolve") return SubtractionMode::deconvolve;
  throw Error(ErrorCode::invalid_argument, "unknown subtraction mode '" + std::string(s) + "'");
}

namespace detail {

inline void check_not_degenerate(const PhotocountDistribution& signal,
                                 const PhotocountDistribution& dark) {
  const std::size_t n = std::max(signal.size(), dark.size());
  bool any_occupied = false;
  for (std::size_t k = 1; k < n; ++k) {
    if (signal[k] == 0.0 && dark[k] == 0.0) continue;
    any_occupied = true;
    if (!(dark[k] > signal[k])) return;
  }
  if (any_occupied)
    throw Error(ErrorCode::degenerate_subtraction,
                "dark distribution is heavier than the signal in every occupied bin");
}

// Clamps negative bins to zero and rescales the rest to the unclamped mass.
inline PhotocountDistribution clamp_and_renormalize(std::vector<double> g,
                                                    std::uint64_t n_triggers) {
  double target = 0.0;
  double positive = 0.0;
  double clamped = 0.0;
  for (double& v : g) {
    target += v;
    if (v < 0.0) {
      clamped -= v;
      v = 0.0;
    }
    positive += v;
  }
  if (!(positive > 0.0))
    throw Error(ErrorCode::degenerate_subtraction, "dark subtraction left no events");
  if (clamped > 0.0) {
    const double scale = target / positive;
    for (double& v : g) v *= scale;
  }
  return PhotocountDistribution(std::move(g), n_triggers, true, clamped);
}

}  // namespace detail

/// Removes dark counts from a signal distribution. Both modes mark the result
/// as renormalized and record any clamped negative mass.
inline PhotocountDistribution subtract_dark(const PhotocountDistribution& signal,
                                            const PhotocountDistribution& dark,
                                            SubtractionMode mode = SubtractionMode::deconvolve) {
  detail::check_not_degenerate(signal, dark);
  const std::size_t n = signal.size();
  std::vector<double> g(n, 0.0);

  if (mode == SubtractionMode::simple) {
    double dark_excess = 0.0;
    for (std::size_t k = 1; k < dark.size(); ++k) dark_excess += dark[k];
    for (std::size_t k = 1; k < n; ++k) g[k] = signal[k] - dark[k];
    if (n > 0) g[0] = signal[0] + dark_excess;
    return detail::clamp_and_renormalize(std::move(g), signal.n_triggers());
  }

  const double d0 = dark[0];
  if (!(d0 > 0.0))
    throw Error(ErrorCode::saturated_dark, "cannot deconvolve: dark distribution has f0 = 0");
  // Forward substitution on the lower-triangular Toeplitz system.
  for (std::size_t k = 0; k < n; ++k) {
    double acc = signal[k];
    const std::size_t jmin = k >= dark.size() ? k - dark.size() + 1 : 0;
    for (std::size_t j = jmin; j < k; ++j) acc -= g[j] * dark[k - j];
    g[k] = acc / d0;
  }
  return detail::clamp_and_renormalize(std::move(g), signal.n_triggers());
}

}  // namespace mppcal

#endif  // MPPCAL_HISTOGRAM_HPP
