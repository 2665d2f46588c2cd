// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPPCAL_FITTING_HPP
#define MPPCAL_FITTING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mppcal/crosstalk.hpp"
#include "mppcal/error.hpp"
#include "mppcal/histogram.hpp"
#include "mppcal/random.hpp"

namespace mppcal {

/// One point of the calibration curve.
struct G2Point {
  double mu_ct = 0.0;  ///< mean photocounts per trigger (after dark subtraction)
  double g2 = 0.0;
  double sigma = 0.0;  ///< bootstrap standard error of g2
};

struct BootstrapOptions {
  unsigned replicates = 200;
  std::uint64_t seed = 0;
  SubtractionMode mode = SubtractionMode::deconvolve;
};

namespace detail {

// Trigger-level resampling with replacement is equivalent to drawing the bin
// counts from Multinomial(n, f); this draws them by sequential binomials.
inline PhotocountDistribution resample(std::span<const double> f, std::uint64_t n,
                                       CounterRng& rng) {
  std::vector<double> out(f.size(), 0.0);
  std::uint64_t remaining = n;
  double remaining_prob = 1.0;
  for (std::size_t k = 0; k < f.size() && remaining > 0; ++k) {
    std::uint64_t x = remaining;
    if (k + 1 < f.size()) {
      const double q = remaining_prob > 0.0 ? std::clamp(f[k] / remaining_prob, 0.0, 1.0) : 1.0;
      std::binomial_distribution<std::uint64_t> bin(remaining, q);
      x = bin(rng);
    }
    out[k] = static_cast<double>(x) / static_cast<double>(n);
    remaining -= x;
    remaining_prob -= f[k];
  }
  return PhotocountDistribution(std::move(out), n);
}

inline std::vector<double> sanitize_fractions(const PhotocountDistribution& d) {
  std::vector<double> f(d.fractions().begin(), d.fractions().end());
  const double total = d.total();
  if (total > 0.0)
    for (double& v : f) v /= total;
  return f;
}

}  // namespace detail

/// g2 point estimate with a bootstrap standard error over triggers. When a
/// dark distribution is given, it is subtracted from the signal before the
/// statistic is computed, and it is resampled too (from its own trigger count)
/// so the error covers the subtraction.
///
/// Throws undefined_statistic for zero mean photocounts and degenerate_point
/// when the bootstrap spread is zero.
inline G2Point estimate_g2_point(const Histogram& signal,
                                 const std::optional<PhotocountDistribution>& dark,
                                 const BootstrapOptions& opts = {}) {
  if (opts.replicates < 50)
    throw Error(ErrorCode::invalid_argument, "bootstrap needs at least 50 replicates");

  auto statistic = [&](const PhotocountDistribution& sig,
                       const std::optional<PhotocountDistribution>& dk) {
    const PhotocountDistribution clean = dk ? subtract_dark(sig, *dk, opts.mode) : sig;
    const double mu = mean_photocounts(clean);
    return std::pair{mu, g2(clean)};
  };

  const PhotocountDistribution sig = build_distribution(signal);
  const auto [mu, value] = statistic(sig, dark);

  const std::vector<double> f_sig(sig.fractions().begin(), sig.fractions().end());
  std::vector<double> f_dark;
  if (dark) f_dark = detail::sanitize_fractions(*dark);

  std::vector<double> replicates;
  replicates.reserve(opts.replicates);
  for (unsigned r = 0; r < opts.replicates; ++r) {
    CounterRng rng(opts.seed, r);
    const PhotocountDistribution s = detail::resample(f_sig, signal.n_triggers(), rng);
    std::optional<PhotocountDistribution> d;
    if (dark) {
      d = dark->n_triggers() > 0 ? detail::resample(f_dark, dark->n_triggers(), rng) : *dark;
    }
    try {
      replicates.push_back(statistic(s, d).second);
    } catch (const Error&) {
      // Replicates where the statistic is undefined are dropped.
    }
  }
  if (replicates.size() < 2)
    throw Error(ErrorCode::degenerate_point, "bootstrap produced fewer than two valid replicates");
  double mean = 0.0;
  for (double v : replicates) mean += v;
  mean /= static_cast<double>(replicates.size());
  double ss = 0.0;
  for (double v : replicates) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(replicates.size() - 1));
  if (!(sigma > 0.0))
    throw Error(ErrorCode::degenerate_point, "bootstrap standard error is zero; point rejected");
  return {mu, value, sigma};
}

inline G2Point estimate_g2_point(const RecordSet& records,
                                 const std::optional<PhotocountDistribution>& dark,
                                 const BootstrapOptions& opts = {}) {
  return estimate_g2_point(Histogram::from_records(records), dark, opts);
}

enum class Boundary { none, lower, upper };

inline std::string_view to_string(Boundary b) noexcept {
  switch (b) {
    case Boundary::none: return "none";
    case Boundary::lower: return "lower";
    default: return "upper";
  }
}

struct FitOptions {
  double lambda0 = 1e-3;
  double p_upper = 0.5 - 1e-6;
  int max_iterations = 200;
  double step_tolerance = 1e-10;
  double chi2_rel_tolerance = 1e-12;
};

struct FitResult {
  double p_hat = 0.0;
  double p_stderr = 0.0;        ///< 1 sigma from the fit alone, scaled by reduced chi^2
  double g0_sensitivity = 0.0;  ///< dp/dg0 at the optimum
  double p_stderr_total = 0.0;  ///< fit error and g0 error added in quadrature
  double aggregate = 0.0;       ///< p + 2p^2
  double aggregate_stderr = 0.0;
  double aggregate_stderr_total = 0.0;
  double chi2 = 0.0;
  double chi2_reduced = 0.0;
  double cod = 0.0;  ///< weighted coefficient of determination
  std::size_t n_points = 0;
  int iterations = 0;
  bool converged = false;
  Boundary boundary = Boundary::none;
  std::vector<double> residuals;  ///< g2_i - model_i
};

/// Weighted chi^2 of the calibration curve at crosstalk probability p.
inline double chi_square(std::span<const G2Point> points, double g0, double p) {
  const auto c = curve_coefficients(p);
  double chi2 = 0.0;
  for (const auto& pt : points) {
    const double r = (pt.g2 - (c.scale * g0 + c.excess / pt.mu_ct)) / pt.sigma;
    chi2 += r * r;
  }
  return chi2;
}

/// Analytic d(chi^2)/dp.
inline double chi_square_gradient(std::span<const G2Point> points, double g0, double p) {
  const auto c = curve_coefficients(p);
  double grad = 0.0;
  for (const auto& pt : points) {
    const double w = 1.0 / (pt.sigma * pt.sigma);
    const double r = pt.g2 - (c.scale * g0 + c.excess / pt.mu_ct);
    const double j = c.d_scale * g0 + c.d_excess / pt.mu_ct;
    grad += -2.0 * w * r * j;
  }
  return grad;
}

/// Fits the single crosstalk parameter of the calibration curve to measured
/// points by weighted Levenberg-Marquardt with steps projected onto
/// [0, p_upper]. Throws too_few_points, invalid_argument for bad points or g0,
/// and no_convergence when the iteration limit is reached.
inline FitResult fit_crosstalk(std::span<const G2Point> points, double g0, double g0_sigma = 0.0,
                               const FitOptions& opts = {}) {
  if (points.size() < 3)
    throw Error(ErrorCode::too_few_points,
                "fit needs at least 3 points, got " + std::to_string(points.size()));
  if (!(g0 > 0.0)) throw Error(ErrorCode::invalid_argument, "g0 must be positive");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (!(pt.sigma > 0.0) || !std::isfinite(pt.sigma) || !(pt.mu_ct > 0.0) ||
        !std::isfinite(pt.g2))
      throw Error(ErrorCode::invalid_argument,
                  "point " + std::to_string(i) + " has invalid sigma, mu_ct or g2");
  }

  // Start from the best point of a coarse grid.
  double p = 0.0;
  double chi2 = chi_square(points, g0, 0.0);
  for (int i = 1; i <= 50; ++i) {
    const double trial = std::min(0.01 * i, opts.p_upper);
    const double c = chi_square(points, g0, trial);
    if (c < chi2) {
      chi2 = c;
      p = trial;
    }
  }

  double lambda = opts.lambda0;
  FitResult res;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    res.iterations = it;
    const auto c = curve_coefficients(p);
    double g = 0.0;
    double h = 0.0;
    for (const auto& pt : points) {
      const double w = 1.0 / (pt.sigma * pt.sigma);
      const double r = pt.g2 - (c.scale * g0 + c.excess / pt.mu_ct);
      const double j = c.d_scale * g0 + c.d_excess / pt.mu_ct;
      g += w * j * r;
      h += w * j * j;
    }
    const double step = h > 0.0 ? g / (h * (1.0 + lambda)) : 0.0;
    const double p_new = std::clamp(p + step, 0.0, opts.p_upper);
    if (std::abs(p_new - p) < opts.step_tolerance) {
      res.converged = true;
      break;
    }
    const double chi2_new = chi_square(points, g0, p_new);
    if (chi2_new <= chi2) {
      const double rel = chi2 > 0.0 ? (chi2 - chi2_new) / chi2 : 0.0;
      p = p_new;
      chi2 = chi2_new;
      lambda /= 10.0;
      if (rel < opts.chi2_rel_tolerance) {
        res.converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
    }
  }
  if (!res.converged)
    throw Error(ErrorCode::no_convergence, "fit did not converge in " +
                                               std::to_string(opts.max_iterations) +
                                               " iterations");

  const auto c = curve_coefficients(p);
  double h = 0.0;
  double dF_dg0 = 0.0;
  double dF_dp = 0.0;
  double sw = 0.0;
  double swy = 0.0;
  res.residuals.reserve(points.size());
  for (const auto& pt : points) {
    const double w = 1.0 / (pt.sigma * pt.sigma);
    const double r = pt.g2 - (c.scale * g0 + c.excess / pt.mu_ct);
    const double j = c.d_scale * g0 + c.d_excess / pt.mu_ct;
    const double dj = c.d2_scale * g0 + c.d2_excess / pt.mu_ct;
    h += w * j * j;
    dF_dg0 += w * (-c.scale * j + r * c.d_scale);
    dF_dp += w * (-j * j + r * dj);
    sw += w;
    swy += w * pt.g2;
    res.residuals.push_back(r);
  }
  const double mean_w = swy / sw;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = 1.0 / (points[i].sigma * points[i].sigma);
    ss_res += w * res.residuals[i] * res.residuals[i];
    ss_tot += w * (points[i].g2 - mean_w) * (points[i].g2 - mean_w);
  }

  const double n = static_cast<double>(points.size());
  res.p_hat = p;
  res.n_points = points.size();
  res.chi2 = chi2;
  res.chi2_reduced = chi2 / (n - 1.0);
  res.p_stderr = h > 0.0 ? std::sqrt(res.chi2_reduced / h) : std::numeric_limits<double>::infinity();
  res.g0_sensitivity = dF_dp != 0.0 ? -dF_dg0 / dF_dp : 0.0;
  res.p_stderr_total = std::hypot(res.p_stderr, res.g0_sensitivity * g0_sigma);
  res.aggregate = p + 2.0 * p * p;
  res.aggregate_stderr = (1.0 + 4.0 * p) * res.p_stderr;
  res.aggregate_stderr_total = (1.0 + 4.0 * p) * res.p_stderr_total;
  // A flat data set is fitted perfectly only by a flat model.
  res.cod = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  res.boundary = p <= 0.0 ? Boundary::lower : (p >= opts.p_upper ? Boundary::upper : Boundary::none);
  return res;
}

struct MethodComparison {
  double aggregate = 0.0;
  double aggregate_stderr = 0.0;
  double p_dc = 0.0;
  double p_dc_stderr = 0.0;
  double difference = 0.0;  ///< aggregate - p_dc
  double combined_sigma = 0.0;
  double n_sigma = 0.0;
  double threshold_sigma = 2.0;
  bool consistent = true;
};

inline MethodComparison compare_values(double aggregate, double aggregate_stderr, double p_dc,
                                       double p_dc_stderr, double threshold_sigma = 2.0) {
  MethodComparison m;
  m.aggregate = aggregate;
  m.aggregate_stderr = aggregate_stderr;
  m.p_dc = p_dc;
  m.p_dc_stderr = p_dc_stderr;
  m.difference = aggregate - p_dc;
  m.combined_sigma = std::hypot(aggregate_stderr, p_dc_stderr);
  m.threshold_sigma = threshold_sigma;
  if (m.difference == 0.0)
    m.n_sigma = 0.0;
  else if (m.combined_sigma > 0.0)
    m.n_sigma = std::abs(m.difference) / m.combined_sigma;
  else
    m.n_sigma = std::numeric_limits<double>::infinity();
  m.consistent = m.n_sigma <= threshold_sigma;
  return m;
}

/// Compares the g2-method aggregate p + 2p^2 with the dark-count estimate.
inline MethodComparison compare_methods(const FitResult& fit, const DarkCalibration& dark,
                                        double threshold_sigma = 2.0) {
  return compare_values(fit.aggregate, fit.aggregate_stderr, dark.p_dc, dark.p_dc_stderr,
                        threshold_sigma);
}

}  // namespace mppcal

#endif  // MPPCAL_FITTING_HPP
