#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace procwatt {

/// Error classes raised by the library. The CLI maps each class to a stable
/// exit code (see exit_code_for).
enum class ErrorCode {
  domain,                 // argument outside the function's domain
  singularity,            // derivative unbounded (n-root at p = 0)
  insufficient_data,      // too few samples / points
  ordering,               // timestamps not strictly increasing
  degenerate_design,      // all abscissae equal
  degenerate_statistics,  // df <= 0 or zero standard error
  no_threshold,           // derivative of D never becomes positive
  mismatch,               // reports computed on different point sets
  input,                  // inconsistent caller input (unknown ids, key sets)
  format,                 // malformed header / document structure
  parse,                  // non-numeric field
  validation,             // value outside its admissible range
  config,                 // invalid protocol configuration
  size_limit,             // exhaustive search instance too large
  profile_kind,           // wrong profile kind for the operation
  io,                     // stream / file failure
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt,
        std::optional<std::size_t> column = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// 1-based line of the offending input, when the error comes from a file.
  std::optional<std::size_t> line() const noexcept { return line_; }
  /// 1-based field index within the line.
  std::optional<std::size_t> column() const noexcept { return column_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::optional<std::size_t> column_;
};

/// 0 ok, 1 internal, 2 input format, 3 insufficient data,
/// 4 profile-kind mismatch, 5 size limit.
int exit_code_for(ErrorCode code) noexcept;

}  // namespace procwatt
