// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPPCAL_KEYVALUE_HPP
#define MPPCAL_KEYVALUE_HPP

#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mppcal/error.hpp"

// Manifests and reports are UTF-8 text made of "key = value" lines in a
// fixed order. Lines starting with '#' are comments. Every document carries
// "format" and "version" keys.

namespace mppcal {

inline constexpr int document_version = 1;

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::parse_error,
                std::string(what) + ": expected a number, got '" + std::string(s) + "'");
  return v;
}

inline std::uint64_t parse_u64(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::parse_error, std::string(what) +
                                            ": expected a non-negative integer, got '" +
                                            std::string(s) + "'");
  return v;
}

class KeyValueDocument {
 public:
  KeyValueDocument() = default;

  KeyValueDocument(std::string_view format, std::string_view command) {
    set("format", format);
    set("version", std::to_string(document_version));
    set("command", command);
  }

  void set(std::string_view key, std::string_view value) {
    if (value.find('\n') != std::string_view::npos)
      throw Error(ErrorCode::invalid_argument, "value for '" + std::string(key) + "' has a newline");
    for (auto& [k, v] : entries_) {
      if (k == key) {
        v = value;
        return;
      }
    }
    entries_.emplace_back(std::string(key), std::string(value));
  }
  void set(std::string_view key, const char* value) { set(key, std::string_view(value)); }
  void set(std::string_view key, const std::string& value) { set(key, std::string_view(value)); }
  void set(std::string_view key, double value) { set(key, format_double(value)); }
  void set(std::string_view key, bool value) { set(key, value ? "true" : "false"); }
  void set(std::string_view key, std::uint64_t value) { set(key, std::to_string(value)); }
  void set(std::string_view key, std::uint32_t value) { set(key, std::to_string(value)); }
  void set(std::string_view key, int value) { set(key, std::to_string(value)); }

  std::optional<std::string_view> get(std::string_view key) const {
    for (const auto& [k, v] : entries_)
      if (k == key) return std::string_view(v);
    return std::nullopt;
  }

  std::string require(std::string_view key) const {
    auto v = get(key);
    if (!v)
      throw Error(ErrorCode::parse_error, source_ + ": missing key '" + std::string(key) + "'");
    return std::string(*v);
  }
  double require_double(std::string_view key) const {
    return parse_double(require(key), source_ + ": " + std::string(key));
  }
  std::uint64_t require_u64(std::string_view key) const {
    return parse_u64(require(key), source_ + ": " + std::string(key));
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

  std::string serialize() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
      out += k;
      out += " = ";
      out += v;
      out += '\n';
    }
    return out;
  }

  static KeyValueDocument parse(std::string_view text, std::string source = "<document>") {
    KeyValueDocument doc;
    doc.source_ = std::move(source);
    std::size_t line_no = 0;
    while (!text.empty()) {
      ++line_no;
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find(" = ");
      if (eq == std::string_view::npos || eq == 0)
        throw Error(ErrorCode::parse_error,
                    doc.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
      const std::string_view key = line.substr(0, eq);
      if (doc.get(key))
        throw Error(ErrorCode::parse_error, doc.source_ + ":" + std::to_string(line_no) +
                                                ": duplicate key '" + std::string(key) + "'");
      doc.entries_.emplace_back(std::string(key), std::string(line.substr(eq + 3)));
    }
    const auto version = doc.get("version");
    if (!doc.get("format") || !version)
      throw Error(ErrorCode::parse_error, doc.source_ + ": missing 'format' or 'version' key");
    if (*version != std::to_string(document_version))
      throw Error(ErrorCode::parse_error,
                  doc.source_ + ": unsupported version '" + std::string(*version) + "'");
    return doc;
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::string source_ = "<document>";
};

}  // namespace mppcal

#endif  // MPPCAL_KEYVALUE_HPP
