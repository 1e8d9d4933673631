#pragma once

#include <stdexcept>
#include <string>

namespace h1loc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two values over different moduli met in one operation.
class ModulusMismatch : public Error {
 public:
  using Error::Error;
};

/// A unit was required (inverse, power by class, Hensel step) but p divides the value.
class NonUnit : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Group closure grew past the configured element cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Exact cohomology refused because the group is larger than the budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// A precondition of a structural construction does not hold for the input.
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

/// A proven statement appears violated; carries a reproduction bundle.
class Falsification : public Error {
 public:
  Falsification(const std::string& what, std::string bundle)
      : Error(what), bundle_(std::move(bundle)) {}
  const std::string& bundle() const noexcept { return bundle_; }

 private:
  std::string bundle_;
};

}  // namespace h1loc
