// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPPCAL_CROSSTALK_HPP
#define MPPCAL_CROSSTALK_HPP

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "mppcal/error.hpp"
#include "mppcal/histogram.hpp"

namespace mppcal {

/// Per-pixel crosstalk probability, 0 <= p < 0.5.
class CrosstalkParam {
 public:
  explicit CrosstalkParam(double p) : p_(p) {
    if (!(p >= 0.0 && p < 0.5))
      throw Error(ErrorCode::model_out_of_range,
                  "crosstalk probability " + std::to_string(p) + " outside [0, 0.5)");
  }
  double value() const noexcept { return p_; }

 private:
  double p_;
};

/// Second-order crosstalk bookkeeping: a k-count event gains one count with
/// probability k*p and two counts with probability k*p^2. Events never change
/// bins other than upward, so total event mass is conserved. The result has
/// two more bins than the input.
///
/// Throws model_out_of_range if some occupied bin has k*p + k*p^2 > 1, where
/// the bookkeeping would produce a negative bin.
inline PhotocountDistribution apply_crosstalk(const PhotocountDistribution& clean,
                                              CrosstalkParam param) {
  const double p = param.value();
  const double p2 = p * p;
  const std::size_t n = clean.size();
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    if (clean[k] > 0.0 && kk * p + kk * p2 > 1.0)
      throw Error(ErrorCode::model_out_of_range,
                  "crosstalk model out of range at k=" + std::to_string(k) + " (k*p + k*p^2 = " +
                      std::to_string(kk * p + kk * p2) + " > 1)");
  }
  std::vector<double> out(n == 0 ? 0 : n + 2, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double f = clean[k];
    if (f == 0.0) continue;
    out[k] += f * (1.0 - kk * p - kk * p2);
    out[k + 1] += kk * p * f;
    out[k + 2] += kk * p2 * f;
  }
  // Rounding in 1 - kp - kp^2 can leave a -0.0 or tiny negative; the exact value is >= 0.
  for (double& v : out)
    if (v < 0.0) v = 0.0;
  return PhotocountDistribution(std::move(out), clean.n_triggers());
}

struct CrosstalkTotals {
  double coincidences = 0.0;  ///< pairwise coincidences per trigger with crosstalk
  double total = 0.0;         ///< mean photocounts per trigger with crosstalk
};

/// Closed-form coincidence and total-count aggregates after crosstalk,
/// computed from the clean distribution's factorial moments.
inline CrosstalkTotals aggregate_totals(const PhotocountDistribution& clean,
                                        CrosstalkParam param) noexcept {
  const double p = param.value();
  const double pairs = pairwise_coincidence_rate(clean);
  const double mean = mean_photocounts(clean);
  return {(1.0 + 2.0 * p + 4.0 * p * p) * pairs + p * (1.0 + 3.0 * p) * mean,
          (1.0 + p + 2.0 * p * p) * mean};
}

struct ModelCurveInput {
  double g0 = 1.0;     ///< correlation of the light without crosstalk
  double mu_ct = 1.0;  ///< mean photocounts per trigger including crosstalk
};

/// Calibration-curve coefficients: g2 = scale(p) * g0 + excess(p) / mu_ct.
struct CurveCoefficients {
  double scale;
  double excess;
  double d_scale;
  double d_excess;
  double d2_scale;
  double d2_excess;
};

inline CurveCoefficients curve_coefficients(double p) noexcept {
  const double den = 1.0 + p + 2.0 * p * p;
  const double d_den = 1.0 + 4.0 * p;
  const double d2_den = 4.0;
  const double num_s = 1.0 + 2.0 * p + 4.0 * p * p;
  const double d_num_s = 2.0 + 8.0 * p;
  const double d2_num_s = 8.0;
  const double num_e = 2.0 * p + 6.0 * p * p;
  const double d_num_e = 2.0 + 12.0 * p;
  const double d2_num_e = 12.0;

  const double den2 = den * den;
  const double den3 = den2 * den;
  const double den4 = den3 * den;

  CurveCoefficients c{};
  c.scale = num_s / den2;
  c.d_scale = d_num_s / den2 - 2.0 * num_s * d_den / den3;
  c.d2_scale = d2_num_s / den2 - 4.0 * d_num_s * d_den / den3 - 2.0 * num_s * d2_den / den3 +
               6.0 * num_s * d_den * d_den / den4;
  c.excess = num_e / den;
  c.d_excess = d_num_e / den - num_e * d_den / den2;
  c.d2_excess = d2_num_e / den - 2.0 * d_num_e * d_den / den2 - num_e * d2_den / den2 +
                2.0 * num_e * d_den * d_den / den3;
  return c;
}

/// Calibration curve: measured g2 as a function of the mean photocount with
/// crosstalk, for light of known crosstalk-free correlation g0.
inline double predicted_g2(CrosstalkParam param, const ModelCurveInput& input) noexcept {
  const auto c = curve_coefficients(param.value());
  return c.scale * input.g0 + c.excess / input.mu_ct;
}

/// Fractional increase of the total count due to crosstalk, p + 2p^2.
inline double aggregate_from_p(CrosstalkParam param) noexcept {
  const double p = param.value();
  return p + 2.0 * p * p;
}

/// Non-negative root of p + 2p^2 = v.
inline CrosstalkParam solve_p_from_aggregate(double v) {
  if (!(v >= 0.0))
    throw Error(ErrorCode::invalid_argument, "aggregate must be non-negative");
  // 2v / (1 + sqrt(1 + 8v)) equals (sqrt(1 + 8v) - 1) / 4 without cancellation.
  return CrosstalkParam(2.0 * v / (1.0 + std::sqrt(1.0 + 8.0 * v)));
}

enum class Validity { ok, warn, fail };

inline std::string_view to_string(Validity v) noexcept {
  switch (v) {
    case Validity::ok: return "ok";
    case Validity::warn: return "warn";
    default: return "fail";
  }
}

struct ValidityThresholds {
  double warn = 0.05;
  double fail = 0.15;
};

struct ValidityReport {
  double ratio = 0.0;  ///< neglected third-order term over retained terms, 3p^3 / (p + 2p^2)
  Validity verdict = Validity::ok;
};

inline ValidityReport validity_check(CrosstalkParam param,
                                     const ValidityThresholds& thresholds = {}) noexcept {
  const double p = param.value();
  ValidityReport r;
  r.ratio = p > 0.0 ? 3.0 * p * p / (1.0 + 2.0 * p) : 0.0;
  r.verdict = r.ratio < thresholds.warn   ? Validity::ok
              : r.ratio < thresholds.fail ? Validity::warn
                                          : Validity::fail;
  return r;
}

}  // namespace mppcal

#endif  // MPPCAL_CROSSTALK_HPP
