#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace coupling_lab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. lambda <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed call: wrong sizes, orders, unordered points, bad parameter ranges.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure failed (bracketing, rejection loop, quadrature).
class NonconvergenceError : public Error {
 public:
  using Error::Error;
};

/// Simulation step budget exhausted.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// An integral that should be finite could not be shown to converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

using WarningHandler = std::function<void(std::string_view)>;

/// Installs a process-wide sink for non-fatal diagnostics; returns the old one.
/// The default handler writes to stderr.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace coupling_lab
