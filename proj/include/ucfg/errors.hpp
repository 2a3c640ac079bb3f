#pragma once

#include <stdexcept>
#include <string>

namespace ucfg {

/// Broad failure classes; the CLI maps each to an exit code.
enum class ErrorCategory {
  kValidation,  // malformed or out-of-contract input
  kCapability,  // input is fine but exceeds a configured limit
  kInternal,    // an invariant that should always hold did not
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), category_(category), code_(std::move(code)) {}

  ErrorCategory category() const noexcept { return category_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorCategory category_;
  std::string code_;
};

#define UCFG_DEFINE_ERROR(Name, Category)                                       \
  class Name : public Error {                                                  \
   public:                                                                     \
    explicit Name(const std::string& message) : Error(Category, #Name, message) {} \
  };

UCFG_DEFINE_ERROR(InvalidInstance, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(ParseError, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(UnresolvedTie, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(NotPreprocessed, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(MTooSmall, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(ZeroBaseUtility, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(HasOutsideOption, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(NoOutsideOption, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(EmptyPriceSet, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(BadEpsilon, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(BadRange, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(BadSpec, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(TTooSmall, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(BadIntegers, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(DegenerateQuantile, ErrorCategory::kValidation)
UCFG_DEFINE_ERROR(SearchSpaceTooLarge, ErrorCategory::kCapability)
UCFG_DEFINE_ERROR(PrecisionLoss, ErrorCategory::kCapability)
UCFG_DEFINE_ERROR(InvariantBreach, ErrorCategory::kInternal)

#undef UCFG_DEFINE_ERROR

}  // namespace ucfg
