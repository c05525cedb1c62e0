#include "procwatt/error.hpp"

namespace procwatt {

namespace {

std::string decorate(const std::string& message, std::optional<std::size_t> line,
                     std::optional<std::size_t> column) {
  if (!line) return message;
  std::string where = "line " + std::to_string(*line);
  if (column) where += ", column " + std::to_string(*column);
  return where + ": " + message;
}

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::singularity: return "singularity";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::ordering: return "ordering";
    case ErrorCode::degenerate_design: return "degenerate-design";
    case ErrorCode::degenerate_statistics: return "degenerate-statistics";
    case ErrorCode::no_threshold: return "no-threshold";
    case ErrorCode::mismatch: return "mismatch";
    case ErrorCode::input: return "input";
    case ErrorCode::format: return "format";
    case ErrorCode::parse: return "parse";
    case ErrorCode::validation: return "validation";
    case ErrorCode::config: return "config";
    case ErrorCode::size_limit: return "size-limit";
    case ErrorCode::profile_kind: return "profile-kind";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::size_t> line, std::optional<std::size_t> column)
    : std::runtime_error(decorate(message, line, column)),
      code_(code),
      line_(line),
      column_(column) {}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::format:
    case ErrorCode::parse:
    case ErrorCode::validation:
    case ErrorCode::config:
    case ErrorCode::ordering:
    case ErrorCode::input:
    case ErrorCode::domain:
      return 2;
    case ErrorCode::insufficient_data:
    case ErrorCode::degenerate_design:
      return 3;
    case ErrorCode::profile_kind:
      return 4;
    case ErrorCode::size_limit:
      return 5;
    default:
      return 1;
  }
}

}  // namespace procwatt
