#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cryptospn/errors.hpp"
#include "cryptospn/spn/spn.hpp"

namespace cryptospn {

struct Violation {
  std::uint32_t node = 0;
  std::string rule;  // weights, arity, completeness, decomposability
  std::string message;
};

struct ValidationReport {
  bool valid = true;
  std::vector<Violation> violations;

  std::string to_string() const;
};

inline constexpr double kWeightTolerance = 1e-9;

ValidationReport validate(const SpnGraph& spn);

class ValidationError : public DomainError {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Throws ValidationError unless validate(spn).valid.
void require_valid(const SpnGraph& spn);

/// RV sets below each node, as sorted index lists.
std::vector<std::vector<std::uint32_t>> scopes(const SpnGraph& spn);

}  // namespace cryptospn
