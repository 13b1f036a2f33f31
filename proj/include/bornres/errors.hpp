#pragma once

#include <stdexcept>
#include <string>

namespace bornres {

// Argument outside the mathematical domain of an operation (k = 0 in the
// S-matrix, r >= a for an interior-only expansion, t <= 0 for a propagator).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace bornres
