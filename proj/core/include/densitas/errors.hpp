#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace densitas {

enum class ErrorCode {
  query_beyond_horizon,
  incompatible_backends,
  modulus_budget_exceeded,
  unsupported_backend,
  not_erdos_ulam,
  sample_not_exact,
  insufficient_prefix,
  not_monotone,
  non_summable_increments,
  no_exact_norm,
  no_valid_cut,
  not_cauchy,
  oracle_contract_violated,
  schedule_too_short,
  invariants_failed,
  kappa_mismatch,
  invalid_argument,
  parse_error,
};

std::string_view to_string(ErrorCode code);

/// Every contract violation raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::string input, std::size_t position, const std::string& message);

  std::size_t position() const noexcept { return position_; }
  const std::string& input() const noexcept { return input_; }
  /// Input line followed by a caret under the offending column.
  std::string caret() const;

 private:
  std::string input_;
  std::size_t position_;
};

}  // namespace densitas
