// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPPCAL_SIMULATOR_HPP
#define MPPCAL_SIMULATOR_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mppcal/error.hpp"
#include "mppcal/histogram.hpp"
#include "mppcal/parallel.hpp"
#include "mppcal/random.hpp"

namespace mppcal {

enum class CascadeMode {
  paper_truncated,   ///< at most two extra counts per event, probabilities n*p and n*p^2
  geometric_cascade  ///< every avalanche may trigger one more, chains up to max_chain_length
};

enum class LightStatistics { coherent, thermal_single_mode };

inline constexpr unsigned max_chain_length = 16;

inline std::string_view to_string(CascadeMode m) noexcept {
  return m == CascadeMode::paper_truncated ? "paper-truncated" : "geometric-cascade";
}

inline CascadeMode parse_cascade_mode(std::string_view s) {
  if (s == "paper-truncated") return CascadeMode::paper_truncated;
  if (s == "geometric-cascade") return CascadeMode::geometric_cascade;
  throw Error(ErrorCode::invalid_argument, "unknown cascade mode '" + std::string(s) + "'");
}

inline std::string_view to_string(LightStatistics s) noexcept {
  return s == LightStatistics::coherent ? "coherent" : "thermal-single-mode";
}

inline LightStatistics parse_light_statistics(std::string_view s) {
  if (s == "coherent") return LightStatistics::coherent;
  if (s == "thermal-single-mode" || s == "thermal") return LightStatistics::thermal_single_mode;
  throw Error(ErrorCode::invalid_argument, "unknown light statistics '" + std::string(s) + "'");
}

struct DetectorConfig {
  std::uint32_t pixels = 400;
  double eta = 1.0;        ///< photon detection efficiency
  double p = 0.0;          ///< per-avalanche crosstalk probability
  double dark_rate = 0.0;  ///< mean dark avalanches per trigger
  CascadeMode cascade = CascadeMode::paper_truncated;

  void validate() const {
    if (pixels < 1) throw Error(ErrorCode::invalid_argument, "pixels must be >= 1");
    if (!(eta >= 0.0 && eta <= 1.0))
      throw Error(ErrorCode::invalid_argument, "eta must lie in [0, 1]");
    if (!(p >= 0.0 && p < 0.5)) throw Error(ErrorCode::invalid_argument, "p must lie in [0, 0.5)");
    if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate))
      throw Error(ErrorCode::invalid_argument, "dark rate must be >= 0");
  }
};

struct SourceConfig {
  double mean_photons = 0.0;  ///< mean photons per trigger at the detector face
  LightStatistics statistics = LightStatistics::coherent;

  void validate() const {
    if (!(mean_photons >= 0.0) || !std::isfinite(mean_photons))
      throw Error(ErrorCode::invalid_argument, "mean photons must be >= 0");
  }
};

struct RunConfig {
  DetectorConfig detector;
  SourceConfig source;
  std::uint64_t n_triggers = 1;
  std::uint64_t seed = 0;

  void validate() const {
    detector.validate();
    source.validate();
    if (n_triggers < 1) throw Error(ErrorCode::invalid_argument, "n_triggers must be >= 1");
  }
};

namespace detail {

// Returns the number of extra avalanches. With saturate set, paper-truncated
// branch probabilities exceeding one in total are scaled down to sum to one
// and *saturated is raised; otherwise that case throws.
template <class Rng>
std::uint32_t cascade_extra(std::uint32_t n_primary, double p, CascadeMode mode, Rng& rng,
                            bool saturate, bool* saturated) {
  if (n_primary == 0 || p == 0.0) return 0;
  if (mode == CascadeMode::paper_truncated) {
    const double n = static_cast<double>(n_primary);
    double single = n * p;
    double twice = n * p * p;
    if (single + twice > 1.0) {
      if (!saturate)
        throw Error(ErrorCode::model_out_of_range,
                    "paper-truncated cascade out of range for n=" + std::to_string(n_primary));
      const double norm = single + twice;
      single /= norm;
      twice /= norm;
      if (saturated) *saturated = true;
    }
    const double u = uniform01(rng);
    if (u < single) return 1;
    if (u < single + twice) return 2;
    return 0;
  }
  std::uint32_t extra = 0;
  for (std::uint32_t i = 0; i < n_primary; ++i) {
    unsigned length = 0;
    while (length < max_chain_length && uniform01(rng) < p) ++length;
    extra += length;
  }
  return extra;
}

}  // namespace detail

/// Adds crosstalk avalanches to n_primary primaries and returns the new count.
/// Paper-truncated mode requires n_primary * (p + p^2) <= 1.
template <class Rng>
std::uint32_t crosstalk_cascade(std::uint32_t n_primary, double p, CascadeMode mode, Rng& rng) {
  return n_primary + detail::cascade_extra(n_primary, p, mode, rng, false, nullptr);
}

/// Draws per-trigger counts for one run configuration. Each trigger uses its
/// own generator keyed by (seed, trigger index), so results do not depend on
/// evaluation order or thread count.
class TriggerSampler {
 public:
  explicit TriggerSampler(const RunConfig& run)
      : run_(run),
        photons_(run.source.mean_photons > 0.0 ? run.source.mean_photons : 1.0),
        thermal_(1.0 / (1.0 + run.source.mean_photons)),
        dark_(run.detector.dark_rate > 0.0 ? run.detector.dark_rate : 1.0),
        pixel_(0, run.detector.pixels - 1) {
    run.validate();
  }

  std::uint32_t operator()(std::uint64_t trigger_index, bool* saturated = nullptr) {
    CounterRng rng(run_.seed, trigger_index);
    const auto& det = run_.detector;

    std::uint32_t photons = 0;
    if (run_.source.mean_photons > 0.0) {
      if (run_.source.statistics == LightStatistics::coherent) {
        auto d = photons_;
        photons = d(rng);
      } else {
        auto d = thermal_;
        photons = d(rng);
      }
    }
    std::uint32_t detected = photons;
    if (det.eta < 1.0) {
      detected = 0;
      for (std::uint32_t i = 0; i < photons; ++i) detected += rng.uniform() < det.eta ? 1u : 0u;
    }
    std::uint32_t dark = 0;
    if (det.dark_rate > 0.0) {
      auto d = dark_;
      dark = d(rng);
    }

    const std::uint32_t hits = detected + dark;
    const std::uint32_t primary = distinct_pixels(hits, rng);
    const std::uint32_t extra =
        detail::cascade_extra(primary, det.p, det.cascade, rng, true, saturated);
    return std::min<std::uint32_t>(primary + extra, det.pixels);
  }

 private:
  std::uint32_t distinct_pixels(std::uint32_t hits, CounterRng& rng) {
    if (hits == 0) return 0;
    if (run_.detector.pixels == 1) return 1;
    scratch_.clear();
    for (std::uint32_t i = 0; i < hits; ++i) {
      auto d = pixel_;
      const std::uint32_t px = d(rng);
      if (std::find(scratch_.begin(), scratch_.end(), px) == scratch_.end()) scratch_.push_back(px);
    }
    return static_cast<std::uint32_t>(scratch_.size());
  }

  RunConfig run_;
  std::poisson_distribution<std::uint32_t> photons_;
  std::geometric_distribution<std::uint32_t> thermal_;
  std::poisson_distribution<std::uint32_t> dark_;
  std::uniform_int_distribution<std::uint32_t> pixel_;
  std::vector<std::uint32_t> scratch_;
};

inline std::uint32_t simulate_trigger(const RunConfig& run, std::uint64_t trigger_index) {
  TriggerSampler sampler(run);
  return sampler(trigger_index);
}

struct SimulationResult {
  RecordSet records;
  /// Triggers whose paper-truncated branch probabilities had to be rescaled.
  std::uint64_t saturated_triggers = 0;
};

inline SimulationResult simulate_run_detailed(const RunConfig& run, unsigned threads = 0) {
  run.validate();
  std::vector<std::uint32_t> counts(run.n_triggers);
  std::atomic<std::uint64_t> saturated{0};
  parallel_for_chunks(counts.size(), threads, [&](std::size_t begin, std::size_t end) {
    TriggerSampler sampler(run);
    std::uint64_t local = 0;
    for (std::size_t i = begin; i < end; ++i) {
      bool sat = false;
      counts[i] = sampler(i, &sat);
      local += sat ? 1 : 0;
    }
    saturated += local;
  });
  const std::uint32_t cap = std::max(default_k_max, run.detector.pixels);
  return {RecordSet(std::move(counts), cap), saturated.load()};
}

inline RecordSet simulate_run(const RunConfig& run, unsigned threads = 0) {
  return simulate_run_detailed(run, threads).records;
}

struct SweepPoint {
  RunConfig run;  ///< effective configuration, including the derived seed
  SimulationResult result;
};

/// One run per intensity; run i uses seed derive_seed(base.seed, i).
inline std::vector<SweepPoint> sweep_intensities(const RunConfig& base,
                                                 std::span<const double> means,
                                                 unsigned threads = 0) {
  if (means.empty()) throw Error(ErrorCode::invalid_argument, "intensity list is empty");
  std::vector<SweepPoint> out;
  out.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    RunConfig run = base;
    run.source.mean_photons = means[i];
    run.seed = derive_seed(base.seed, i);
    out.push_back({run, simulate_run_detailed(run, threads)});
  }
  return out;
}

}  // namespace mppcal

#endif  // MPPCAL_SIMULATOR_HPP
