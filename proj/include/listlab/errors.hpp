#pragma once

#include <stdexcept>
#include <string>

namespace listlab {

// Thrown when an enumeration / search exceeds its configured node or sample
// cap. best_found carries the best lower bound obtained before giving up
// (-1 when not meaningful).
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what, long best_found = -1)
      : std::runtime_error(what), best_found(best_found) {}
  long best_found;
};

}  // namespace listlab
