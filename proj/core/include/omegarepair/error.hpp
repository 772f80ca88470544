#pragma once

#include <stdexcept>
#include <string>

namespace omegarepair {

enum class ErrorCode {
  PARSE,
  ALPHABET_MISMATCH,
  INVALID_MODEL,
  NO_SUCCESSOR,
  ACYCLIC,
  INFEASIBLE,
  BAD_EPSILON,
  BAD_AGGREGATOR,
  NONDET_INPUT,
  SIZE_LIMIT,
  UNDECIDABLE_MEAN_MASK,
  BUDGET_EXCEEDED,
  INTERNAL,
};

const char* to_string(ErrorCode c);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

} // namespace omegarepair
