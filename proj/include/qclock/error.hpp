#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace qclock {

enum class ErrorCode {
  dimension_mismatch,
  domain,
  validation,
  numerical_support,
  numerical_degeneracy,
  precondition,
  config,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::domain: return "domain_error";
    case ErrorCode::validation: return "validation_error";
    case ErrorCode::numerical_support: return "numerical_support";
    case ErrorCode::numerical_degeneracy: return "numerical_degeneracy";
    case ErrorCode::precondition: return "precondition_violated";
    case ErrorCode::config: return "config_error";
  }
  return "unknown";
}

/// Every failure raised by the library. `detail` carries machine-oriented
/// context (offending field, measured defect) and may be empty.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace qclock
