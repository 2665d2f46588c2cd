// SPDX-FileCopyrightText: 2026 The mppcal authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MPPCAL_ERROR_HPP
#define MPPCAL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mppcal {

/// Broad failure category. The CLI maps each category to its own exit code.
enum class ErrorCategory {
  usage,        ///< invalid arguments or configuration
  data,         ///< input data cannot support the requested statistic
  convergence,  ///< an iterative fit did not converge
  io            ///< file could not be read or written
};

/// Specific failure reason, finer than the category.
enum class ErrorCode {
  invalid_argument,
  empty_records,
  count_above_cap,
  undefined_statistic,
  saturated_dark,
  no_dark_counts,
  degenerate_subtraction,
  model_out_of_range,
  degenerate_point,
  too_few_points,
  no_convergence,
  parse_error,
  io_failure
};

constexpr ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::too_few_points:
      return ErrorCategory::usage;
    case ErrorCode::no_convergence:
      return ErrorCategory::convergence;
    case ErrorCode::io_failure:
      return ErrorCategory::io;
    default:
      return ErrorCategory::data;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace mppcal

#endif  // MPPCAL_ERROR_HPP
