// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPPCAL_IO_HPP
#define MPPCAL_IO_HPP

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mppcal/error.hpp"
#include "mppcal/histogram.hpp"

// Record files hold one non-negative integer per line; lines starting with
// '#' and blank lines are ignored. Histogram files start with a
// "triggers=<n>" header followed by "k<TAB>count" lines.

namespace mppcal::io {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open '" + path.string() + "' for reading");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::io_failure, "read failure on '" + path.string() + "'");
  return text;
}

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_failure, "cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::io_failure, "write failure on '" + path.string() + "'");
}

namespace detail {

template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    f(line, line_no);
  }
}

template <class T>
T parse_unsigned(std::string_view token, std::string_view source, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty())
    throw Error(ErrorCode::parse_error, std::string(source) + ":" + std::to_string(line_no) +
                                            ": expected a non-negative integer, got '" +
                                            std::string(token) + "'");
  return value;
}

}  // namespace detail

inline RecordSet parse_records(std::string_view text, std::uint32_t k_max = default_k_max,
                               std::string_view source = "<records>") {
  std::vector<std::uint32_t> counts;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto c = detail::parse_unsigned<std::uint32_t>(line, source, line_no);
    if (c > k_max)
      throw Error(ErrorCode::count_above_cap, std::string(source) + ":" + std::to_string(line_no) +
                                                  ": count " + std::to_string(c) +
                                                  " exceeds k_max=" + std::to_string(k_max));
    counts.push_back(c);
  });
  if (counts.empty())
    throw Error(ErrorCode::empty_records, std::string(source) + ": no records");
  return RecordSet(std::move(counts), k_max);
}

inline std::string format_records(const RecordSet& records) {
  std::string out;
  out.reserve(records.n_triggers() * 2);
  char buf[16];
  for (std::uint32_t c : records.counts()) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, c);
    out.append(buf, ptr);
    out.push_back('\n');
  }
  return out;
}

inline RecordSet read_records(const std::filesystem::path& path,
                              std::uint32_t k_max = default_k_max) {
  return parse_records(read_file(path), k_max, path.string());
}

inline void write_records(const std::filesystem::path& path, const RecordSet& records) {
  write_file(path, format_records(records));
}

inline Histogram parse_histogram(std::string_view text, std::uint32_t k_max = default_k_max,
                                 std::string_view source = "<histogram>") {
  std::uint64_t declared = 0;
  bool have_header = false;
  std::vector<std::uint64_t> bins;
  std::vector<bool> seen;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (!have_header) {
      constexpr std::string_view key = "triggers=";
      if (line.substr(0, key.size()) != key)
        throw Error(ErrorCode::parse_error, std::string(source) + ":" + std::to_string(line_no) +
                                                ": expected 'triggers=<n>' header");
      declared = detail::parse_unsigned<std::uint64_t>(line.substr(key.size()), source, line_no);
      have_header = true;
      return;
    }
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      throw Error(ErrorCode::parse_error, std::string(source) + ":" + std::to_string(line_no) +
                                              ": expected 'k<TAB>count'");
    const auto k = detail::parse_unsigned<std::uint32_t>(line.substr(0, tab), source, line_no);
    const auto n = detail::parse_unsigned<std::uint64_t>(line.substr(tab + 1), source, line_no);
    if (k > k_max)
      throw Error(ErrorCode::count_above_cap, std::string(source) + ":" + std::to_string(line_no) +
                                                  ": bin " + std::to_string(k) +
                                                  " exceeds k_max=" + std::to_string(k_max));
    if (k >= bins.size()) {
      bins.resize(k + 1, 0);
      seen.resize(k + 1, false);
    }
    if (seen[k])
      throw Error(ErrorCode::parse_error, std::string(source) + ":" + std::to_string(line_no) +
                                              ": duplicate bin " + std::to_string(k));
    seen[k] = true;
    bins[k] = n;
  });
  if (!have_header)
    throw Error(ErrorCode::parse_error, std::string(source) + ": missing 'triggers=' header");
  Histogram hist(std::move(bins));
  if (hist.n_triggers() != declared)
    throw Error(ErrorCode::parse_error, std::string(source) + ": bins sum to " +
                                            std::to_string(hist.n_triggers()) + " but header says " +
                                            std::to_string(declared));
  return hist;
}

inline std::string format_histogram(const Histogram& hist) {
  std::ostringstream out;
  out << "triggers=" << hist.n_triggers() << '\n';
  for (std::size_t k = 0; k < hist.size(); ++k) out << k << '\t' << hist[k] << '\n';
  return out.str();
}

inline Histogram read_histogram(const std::filesystem::path& path,
                                std::uint32_t k_max = default_k_max) {
  return parse_histogram(read_file(path), k_max, path.string());
}

inline void write_histogram(const std::filesystem::path& path, const Histogram& hist) {
  write_file(path, format_histogram(hist));
}

}  // namespace mppcal::io

#endif  // MPPCAL_IO_HPP
