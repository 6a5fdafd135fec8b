#pragma once

#include <stdexcept>
#include <string>

namespace qhecke {

enum class errc {
  zero,
  norm_even,
  not_primary,
  budget_exceeded,
  not_squarefree,
  not_coprime,
  trivial,
  not_primitive,
  not_in_family,
  nonpositive_argument,
  even_prime,
  region,
  hypothesis_violated,
  corrupt_cache,
  overflow,
  parse,
  mismatch,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::zero: return "Zero";
    case errc::norm_even: return "NormEven";
    case errc::not_primary: return "NotPrimary";
    case errc::budget_exceeded: return "BudgetExceeded";
    case errc::not_squarefree: return "NotSquarefree";
    case errc::not_coprime: return "NotCoprime";
    case errc::trivial: return "Trivial";
    case errc::not_primitive: return "NotPrimitive";
    case errc::not_in_family: return "NotInFamily";
    case errc::nonpositive_argument: return "NonPositiveArgument";
    case errc::even_prime: return "EvenPrime";
    case errc::region: return "RegionError";
    case errc::hypothesis_violated: return "HypothesisViolated";
    case errc::corrupt_cache: return "CorruptCache";
    case errc::overflow: return "Overflow";
    case errc::parse: return "ParseError";
    case errc::mismatch: return "Mismatch";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace qhecke
