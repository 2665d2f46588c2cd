// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

// mppcal command-line front end: simulate, calibrate-g2, calibrate-dark, compare.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mppcal/mppcal.hpp"

namespace fs = std::filesystem;
using namespace mppcal;

namespace {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 2,
  exit_data = 3,
  exit_convergence = 4,
  exit_io = 5
};

// Salt for the dark-run seed, kept apart from the per-intensity indices.
constexpr std::uint64_t dark_stream = 0xda4cull << 32;

struct SimulateArgs {
  std::uint32_t pixels = 400;
  double eta = 1.0;
  double p = 0.0;
  double dark = 0.0;
  std::string cascade = "paper-truncated";
  std::string source = "coherent";
  std::string means;
  std::string means_scale = "linear";
  std::uint64_t triggers = 0;
  std::optional<std::uint64_t> dark_triggers;
  std::optional<std::uint64_t> seed;
  std::string manifest;
  std::string out;
  unsigned threads = 0;
};

struct CalibrateG2Args {
  std::string manifest;
  std::vector<std::string> records;
  std::string dark_records;
  double g0 = 1.0;
  double g0_sigma = 0.0;
  unsigned bootstrap = 200;
  std::string subtract_mode = "deconvolve";
  std::uint64_t seed = 1;
  std::uint32_t kmax = default_k_max;
  double warn = 0.05;
  double fail = 0.15;
  std::string out;
  std::string points;
};

struct CalibrateDarkArgs {
  std::string manifest;
  std::string records;
  std::uint32_t kmax = default_k_max;
  std::string out;
};

struct CompareArgs {
  std::vector<std::string> g2_reports;
  std::vector<std::string> dark_reports;
  std::vector<double> g2_values;
  std::vector<double> g2_stderrs;
  std::vector<double> pdc_values;
  std::vector<double> pdc_stderrs;
  double threshold = 2.0;
  std::string out;
  std::string series;
};

Error usage(const std::string& msg) { return Error(ErrorCode::invalid_argument, msg); }

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ',';
    s += items[i];
  }
  return s;
}

std::string join(const std::vector<double>& items) {
  std::string s;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) s += ',';
    s += format_double(items[i]);
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

/// "start:stop:count", a comma-separated list, or a single value.
std::vector<double> parse_means(const std::string& text, const std::string& scale) {
  if (text.empty()) throw usage("--means is required");
  std::vector<double> means;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw usage("--means range must be start:stop:count");
    const double start = parse_double(parts[0], "--means start");
    const double stop = parse_double(parts[1], "--means stop");
    const auto count = parse_u64(parts[2], "--means count");
    if (count < 1) throw usage("--means count must be >= 1");
    if (scale == "geometric" && !(start > 0.0 && stop > 0.0))
      throw usage("geometric --means needs positive bounds");
    for (std::uint64_t i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
      means.push_back(scale == "geometric" ? start * std::pow(stop / start, t)
                                           : start + t * (stop - start));
    }
  } else {
    for (const auto& part : split(text, ',')) means.push_back(parse_double(part, "--means"));
  }
  for (double m : means)
    if (!(m >= 0.0)) throw usage("--means values must be >= 0");
  return means;
}

std::string signal_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "signal_%02zu.txt", i);
  return buf;
}

int cmd_simulate(SimulateArgs args, bool means_given, bool triggers_given,
                 bool config_flags_given) {
  RunConfig base;
  std::vector<double> means;
  std::uint64_t dark_triggers = 0;

  if (!args.manifest.empty()) {
    if (config_flags_given) throw usage("--manifest cannot be combined with run parameters");
    const auto doc = KeyValueDocument::parse(io::read_file(args.manifest), args.manifest);
    if (doc.require("format") != "mppcal-manifest")
      throw usage(args.manifest + " is not a simulate manifest");
    base.detector.pixels = static_cast<std::uint32_t>(doc.require_u64("detector.pixels"));
    base.detector.eta = doc.require_double("detector.eta");
    base.detector.p = doc.require_double("detector.p");
    base.detector.dark_rate = doc.require_double("detector.dark_rate");
    base.detector.cascade = parse_cascade_mode(doc.require("detector.cascade_mode"));
    base.source.statistics = parse_light_statistics(doc.require("source.statistics"));
    base.n_triggers = doc.require_u64("run.triggers");
    base.seed = doc.require_u64("run.seed");
    dark_triggers = doc.require_u64("run.dark_triggers");
    args.means = doc.require("sweep.means");
    args.means_scale = "linear";
    means = parse_means(args.means, args.means_scale);
  } else {
    if (!args.seed) throw usage("--seed is required for simulate");
    if (!means_given) throw usage("--means is required for simulate");
    if (!triggers_given) throw usage("--triggers is required for simulate");
    base.detector = {args.pixels, args.eta, args.p, args.dark, parse_cascade_mode(args.cascade)};
    base.source.statistics = parse_light_statistics(args.source);
    base.n_triggers = args.triggers;
    base.seed = *args.seed;
    dark_triggers = args.dark_triggers.value_or(args.triggers);
    if (args.means_scale != "linear" && args.means_scale != "geometric")
      throw usage("--means-scale must be linear or geometric");
    means = parse_means(args.means, args.means_scale);
  }
  base.validate();

  const fs::path out(args.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::io_failure, "cannot create '" + out.string() + "': " + ec.message());

  KeyValueDocument manifest("mppcal-manifest", "simulate");
  manifest.set("detector.pixels", base.detector.pixels);
  manifest.set("detector.eta", base.detector.eta);
  manifest.set("detector.p", base.detector.p);
  manifest.set("detector.dark_rate", base.detector.dark_rate);
  manifest.set("detector.cascade_mode", to_string(base.detector.cascade));
  manifest.set("source.statistics", to_string(base.source.statistics));
  manifest.set("run.triggers", base.n_triggers);
  manifest.set("run.dark_triggers", dark_triggers);
  manifest.set("run.seed", base.seed);
  manifest.set("sweep.means", join(means));
  manifest.set("sweep.count", static_cast<std::uint64_t>(means.size()));

  const auto sweep = sweep_intensities(base, means, args.threads);
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const auto name = signal_file_name(i);
    io::write_records(out / name, sweep[i].result.records);
    const std::string key = "output.signal." + std::to_string(i);
    manifest.set(key + ".file", name);
    manifest.set(key + ".mean_photons", sweep[i].run.source.mean_photons);
    manifest.set(key + ".seed", sweep[i].run.seed);
    manifest.set(key + ".saturated_triggers", sweep[i].result.saturated_triggers);
  }
  if (dark_triggers > 0) {
    RunConfig dark = base;
    dark.source.mean_photons = 0.0;
    dark.n_triggers = dark_triggers;
    dark.seed = derive_seed(base.seed, dark_stream);
    const auto result = simulate_run_detailed(dark, args.threads);
    io::write_records(out / "dark.txt", result.records);
    manifest.set("output.dark.file", "dark.txt");
    manifest.set("output.dark.seed", dark.seed);
    manifest.set("output.dark.saturated_triggers", result.saturated_triggers);
  }
  io::write_file(out / "manifest.txt", manifest.serialize());
  std::cout << "wrote " << sweep.size() << " record file(s)" << (dark_triggers > 0 ? " + dark" : "")
            << " to " << out.string() << '\n';
  return exit_ok;
}

struct ManifestInputs {
  std::vector<fs::path> records;
  std::optional<fs::path> dark;
};

ManifestInputs read_manifest_inputs(const std::string& path) {
  const auto doc = KeyValueDocument::parse(io::read_file(path), path);
  const fs::path dir = fs::path(path).parent_path();
  ManifestInputs in;
  const auto count = doc.require_u64("sweep.count");
  for (std::uint64_t i = 0; i < count; ++i)
    in.records.push_back(dir / doc.require("output.signal." + std::to_string(i) + ".file"));
  if (auto d = doc.get("output.dark.file")) in.dark = dir / std::string(*d);
  return in;
}

int cmd_calibrate_g2(const CalibrateG2Args& args) {
  std::vector<fs::path> records;
  std::optional<fs::path> dark_path;
  if (!args.manifest.empty()) {
    if (!args.records.empty() || !args.dark_records.empty())
      throw usage("--manifest cannot be combined with --records/--dark-records");
    auto in = read_manifest_inputs(args.manifest);
    records = std::move(in.records);
    dark_path = std::move(in.dark);
  } else {
    for (const auto& r : args.records) records.emplace_back(r);
    if (!args.dark_records.empty()) dark_path = args.dark_records;
  }
  if (records.size() < 3)
    throw Error(ErrorCode::too_few_points,
                "calibrate-g2 needs at least 3 record files, got " + std::to_string(records.size()));
  if (!dark_path) throw usage("calibrate-g2 needs a dark record file");

  const auto mode = parse_subtraction_mode(args.subtract_mode);
  const Histogram dark_hist = Histogram::from_records(io::read_records(*dark_path, args.kmax));
  const PhotocountDistribution dark = build_distribution(dark_hist);

  KeyValueDocument report("mppcal-report", "calibrate-g2");
  report.set("config.g0", args.g0);
  report.set("config.g0_sigma", args.g0_sigma);
  report.set("config.bootstrap", args.bootstrap);
  report.set("config.subtract_mode", to_string(mode));
  report.set("config.seed", args.seed);
  report.set("config.kmax", args.kmax);
  report.set("config.validity_warn", args.warn);
  report.set("config.validity_fail", args.fail);
  if (!args.manifest.empty()) report.set("input.manifest", args.manifest);
  std::vector<std::string> names;
  for (const auto& r : records) names.push_back(r.string());
  report.set("input.records", join(names));
  report.set("input.dark_records", dark_path->string());
  report.set("dark.triggers", dark_hist.n_triggers());

  std::vector<G2Point> points;
  std::string table = "# mu_ct\tg2\tsigma\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string key = "point." + std::to_string(i);
    const Histogram hist = Histogram::from_records(io::read_records(records[i], args.kmax));
    report.set(key + ".triggers", hist.n_triggers());
    try {
      const PhotocountDistribution clean = subtract_dark(build_distribution(hist), dark, mode);
      report.set(key + ".clamped_mass", clean.clamped_mass());
      const auto pt = estimate_g2_point(hist, dark, {args.bootstrap, derive_seed(args.seed, i), mode});
      report.set(key + ".status", "ok");
      report.set(key + ".mu_ct", pt.mu_ct);
      report.set(key + ".g2", pt.g2);
      report.set(key + ".sigma", pt.sigma);
      points.push_back(pt);
      table += format_double(pt.mu_ct) + '\t' + format_double(pt.g2) + '\t' +
               format_double(pt.sigma) + '\n';
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::data) throw;
      report.set(key + ".status", "rejected");
      report.set(key + ".reason", e.what());
      std::cerr << "warning: " << records[i].string() << ": point rejected: " << e.what() << '\n';
    }
  }

  const fs::path points_path = args.points.empty() ? fs::path(args.out + ".points.tsv") : fs::path(args.points);
  io::write_file(points_path, table);
  report.set("output.points", points_path.string());

  const FitResult fit = fit_crosstalk(points, args.g0, args.g0_sigma);
  const auto validity = validity_check(CrosstalkParam(fit.p_hat), {args.warn, args.fail});
  report.set("fit.uncertainty", "1-sigma");
  report.set("fit.p", fit.p_hat);
  report.set("fit.p_stderr", fit.p_stderr);
  report.set("fit.g0_sensitivity", fit.g0_sensitivity);
  report.set("fit.p_stderr_total", fit.p_stderr_total);
  report.set("fit.aggregate", fit.aggregate);
  report.set("fit.aggregate_stderr", fit.aggregate_stderr);
  report.set("fit.aggregate_stderr_total", fit.aggregate_stderr_total);
  report.set("fit.chi2", fit.chi2);
  report.set("fit.chi2_reduced", fit.chi2_reduced);
  report.set("fit.cod", fit.cod);
  report.set("fit.n_points", static_cast<std::uint64_t>(fit.n_points));
  report.set("fit.iterations", fit.iterations);
  report.set("fit.converged", fit.converged);
  report.set("fit.boundary", to_string(fit.boundary));
  report.set("validity.ratio", validity.ratio);
  report.set("validity.verdict", to_string(validity.verdict));
  io::write_file(args.out, report.serialize());

  std::cout << "p = " << format_double(fit.p_hat) << " +/- " << format_double(fit.p_stderr)
            << ", p+2p^2 = " << format_double(fit.aggregate) << " +/- "
            << format_double(fit.aggregate_stderr) << ", COD = " << format_double(fit.cod)
            << (fit.boundary != Boundary::none ? " [boundary: " + std::string(to_string(fit.boundary)) + "]" : "")
            << '\n';
  return exit_ok;
}

int cmd_calibrate_dark(const CalibrateDarkArgs& args) {
  fs::path path;
  if (!args.manifest.empty()) {
    if (!args.records.empty()) throw usage("--manifest cannot be combined with --records");
    auto in = read_manifest_inputs(args.manifest);
    if (!in.dark) throw usage(args.manifest + " lists no dark record file");
    path = *in.dark;
  } else {
    if (args.records.empty()) throw usage("calibrate-dark needs --records or --manifest");
    path = args.records;
  }
  const Histogram hist = Histogram::from_records(io::read_records(path, args.kmax));
  const DarkCalibration cal = dark_crosstalk_probability(build_distribution(hist));

  KeyValueDocument report("mppcal-report", "calibrate-dark");
  report.set("config.kmax", args.kmax);
  if (!args.manifest.empty()) report.set("input.manifest", args.manifest);
  report.set("input.dark_records", path.string());
  report.set("dark.triggers", hist.n_triggers());
  report.set("dark.uncertainty", "1-sigma");
  report.set("dark.mean", cal.mean_dark);
  report.set("dark.p_dc", cal.p_dc);
  report.set("dark.p_dc_stderr", cal.p_dc_stderr);
  io::write_file(args.out, report.serialize());
  std::cout << "<N>_DC = " << format_double(cal.mean_dark) << ", p_DC = " << format_double(cal.p_dc)
            << " +/- " << format_double(cal.p_dc_stderr) << '\n';
  return exit_ok;
}

// Value and 1-sigma error carried by a report: the aggregate for a
// calibrate-g2 report, p_DC for a calibrate-dark report.
std::pair<double, double> report_value(const std::string& path) {
  const auto doc = KeyValueDocument::parse(io::read_file(path), path);
  const auto command = doc.require("command");
  if (command == "calibrate-g2")
    return {doc.require_double("fit.aggregate"), doc.require_double("fit.aggregate_stderr")};
  if (command == "calibrate-dark")
    return {doc.require_double("dark.p_dc"), doc.require_double("dark.p_dc_stderr")};
  throw usage(path + ": report of command '" + command + "' carries no crosstalk estimate");
}

int cmd_compare(const CompareArgs& args) {
  struct Pair {
    std::string g2_source, dark_source;
    MethodComparison cmp;
  };
  std::vector<Pair> pairs;

  if (args.g2_reports.size() != args.dark_reports.size())
    throw usage("--g2-report and --dark-report must be given the same number of times");
  for (std::size_t i = 0; i < args.g2_reports.size(); ++i) {
    const auto [a, sa] = report_value(args.g2_reports[i]);
    const auto [b, sb] = report_value(args.dark_reports[i]);
    pairs.push_back({args.g2_reports[i], args.dark_reports[i], compare_values(a, sa, b, sb, args.threshold)});
  }
  const std::size_t n = args.g2_values.size();
  if (args.g2_stderrs.size() != n || args.pdc_values.size() != n || args.pdc_stderrs.size() != n)
    throw usage("--g2-value, --g2-stderr, --pdc-value and --pdc-stderr must be given the same number of times");
  for (std::size_t i = 0; i < n; ++i)
    pairs.push_back({"literal", "literal",
                     compare_values(args.g2_values[i], args.g2_stderrs[i], args.pdc_values[i],
                                    args.pdc_stderrs[i], args.threshold)});
  if (pairs.empty()) throw usage("compare needs at least one pair of inputs");

  KeyValueDocument report("mppcal-report", "compare");
  report.set("config.threshold_sigma", args.threshold);
  report.set("comparison.count", static_cast<std::uint64_t>(pairs.size()));
  std::string series = "# aggregate\taggregate_stderr\tp_dc\tp_dc_stderr\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [g2_src, dark_src, c] = pairs[i];
    const std::string key = "comparison." + std::to_string(i);
    report.set(key + ".g2_source", g2_src);
    report.set(key + ".dark_source", dark_src);
    report.set(key + ".aggregate", c.aggregate);
    report.set(key + ".aggregate_stderr", c.aggregate_stderr);
    report.set(key + ".p_dc", c.p_dc);
    report.set(key + ".p_dc_stderr", c.p_dc_stderr);
    report.set(key + ".difference", c.difference);
    report.set(key + ".combined_sigma", c.combined_sigma);
    report.set(key + ".n_sigma", c.n_sigma);
    report.set(key + ".verdict", c.consistent ? "consistent" : "inconsistent");
    series += format_double(c.aggregate) + '\t' + format_double(c.aggregate_stderr) + '\t' +
              format_double(c.p_dc) + '\t' + format_double(c.p_dc_stderr) + '\n';
    std::cout << "[" << i << "] " << format_double(c.aggregate) << " vs " << format_double(c.p_dc)
              << ": " << format_double(c.n_sigma) << " sigma, "
              << (c.consistent ? "consistent" : "inconsistent") << '\n';
  }
  if (pairs.size() > 1 || !args.series.empty()) {
    const std::string path = args.series.empty() ? args.out + ".series.tsv" : args.series;
    io::write_file(path, series);
    report.set("output.series", path);
  }
  io::write_file(args.out, report.serialize());
  return exit_ok;
}

int exit_code_for(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::usage: return exit_usage;
    case ErrorCategory::convergence: return exit_convergence;
    case ErrorCategory::io: return exit_io;
    default: return exit_data;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crosstalk calibration of multi-pixel photon counters"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate an intensity sweep and a dark run");
  auto* o_pixels = simulate->add_option("--pixels", sim.pixels, "Pixel count")->capture_default_str();
  auto* o_eta = simulate->add_option("--eta", sim.eta, "Photon detection efficiency")->capture_default_str();
  auto* o_p = simulate->add_option("--p", sim.p, "Crosstalk probability")->capture_default_str();
  auto* o_dark = simulate->add_option("--dark", sim.dark, "Dark avalanches per trigger")->capture_default_str();
  auto* o_cascade = simulate->add_option("--cascade-mode", sim.cascade, "paper-truncated | geometric-cascade")
                        ->capture_default_str();
  auto* o_source = simulate->add_option("--source", sim.source, "coherent | thermal-single-mode")
                       ->capture_default_str();
  auto* o_means = simulate->add_option("--means", sim.means, "start:stop:count, a,b,c, or a single value");
  auto* o_scale = simulate->add_option("--means-scale", sim.means_scale, "linear | geometric")->capture_default_str();
  auto* o_triggers = simulate->add_option("--triggers", sim.triggers, "Triggers per intensity");
  auto* o_dark_triggers = simulate->add_option("--dark-triggers", sim.dark_triggers,
                                               "Triggers in the dark run (default: --triggers; 0 disables)");
  auto* o_seed = simulate->add_option("--seed", sim.seed, "Base seed (required)");
  simulate->add_option("--manifest", sim.manifest, "Rerun the configuration recorded in a manifest");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");

  CalibrateG2Args g2a;
  auto* cal_g2 = app.add_subcommand("calibrate-g2", "Fit the crosstalk probability from g2 points");
  cal_g2->add_option("--manifest", g2a.manifest, "Simulate manifest listing record files");
  cal_g2->add_option("--records", g2a.records, "Signal record files (>= 3)");
  cal_g2->add_option("--dark-records", g2a.dark_records, "Dark record file");
  cal_g2->add_option("--g0", g2a.g0, "Crosstalk-free g2 of the source")->capture_default_str();
  cal_g2->add_option("--g0-sigma", g2a.g0_sigma, "Uncertainty of g0")->capture_default_str();
  cal_g2->add_option("--bootstrap", g2a.bootstrap, "Bootstrap replicates per point")->capture_default_str();
  cal_g2->add_option("--subtract-mode", g2a.subtract_mode, "deconvolve | simple")->capture_default_str();
  cal_g2->add_option("--seed", g2a.seed, "Bootstrap seed")->capture_default_str();
  cal_g2->add_option("--kmax", g2a.kmax, "Largest accepted count per trigger")->capture_default_str();
  cal_g2->add_option("--validity-warn", g2a.warn, "Third-order ratio warn threshold")->capture_default_str();
  cal_g2->add_option("--validity-fail", g2a.fail, "Third-order ratio fail threshold")->capture_default_str();
  cal_g2->add_option("--out", g2a.out, "Report file")->required();
  cal_g2->add_option("--points", g2a.points, "Points file (default: <out>.points.tsv)");

  CalibrateDarkArgs da;
  auto* cal_dark = app.add_subcommand("calibrate-dark", "Estimate crosstalk from dark-count statistics");
  cal_dark->add_option("--manifest", da.manifest, "Simulate manifest naming the dark file");
  cal_dark->add_option("--records", da.records, "Dark record file");
  cal_dark->add_option("--kmax", da.kmax, "Largest accepted count per trigger")->capture_default_str();
  cal_dark->add_option("--out", da.out, "Report file")->required();

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "Compare g2-method and dark-method estimates");
  compare->add_option("--g2-report", ca.g2_reports, "g2-method report (repeatable)");
  compare->add_option("--dark-report", ca.dark_reports, "Dark-method report (repeatable)");
  compare->add_option("--g2-value", ca.g2_values, "Literal p+2p^2 value (repeatable)");
  compare->add_option("--g2-stderr", ca.g2_stderrs, "Literal p+2p^2 error (repeatable)");
  compare->add_option("--pdc-value", ca.pdc_values, "Literal p_DC value (repeatable)");
  compare->add_option("--pdc-stderr", ca.pdc_stderrs, "Literal p_DC error (repeatable)");
  compare->add_option("--threshold", ca.threshold, "Consistency threshold in sigma")->capture_default_str();
  compare->add_option("--out", ca.out, "Report file")->required();
  compare->add_option("--series", ca.series, "Plot series file (default: <out>.series.tsv when > 1 pair)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (*simulate) {
      bool config_flags = false;
      for (auto* o : {o_pixels, o_eta, o_p, o_dark, o_cascade, o_source, o_means, o_scale, o_triggers,
                      o_dark_triggers, o_seed})
        config_flags = config_flags || o->count() > 0;
      return cmd_simulate(sim, o_means->count() > 0, o_triggers->count() > 0, config_flags);
    }
    if (*cal_g2) return cmd_calibrate_g2(g2a);
    if (*cal_dark) return cmd_calibrate_dark(da);
    if (*compare) return cmd_compare(ca);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  }
  return exit_usage;
}
