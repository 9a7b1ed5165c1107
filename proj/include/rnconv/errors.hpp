#pragma once

#include <stdexcept>

namespace rnc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidDistribution : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct RootBracketError : Error { using Error::Error; };
struct QuadratureError : Error { using Error::Error; };
struct SolverError : Error { using Error::Error; };
struct ResourceLimit : Error { using Error::Error; };
struct ProductStateError : Error { using Error::Error; };
struct InvalidState : Error { using Error::Error; };

}  // namespace rnc
