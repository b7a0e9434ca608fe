#ifndef WCURV_ERRORS_HPP
#define WCURV_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wcurv {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Chart construction / mismatch problems.
class ChartError : public Error {
public:
  using Error::Error;
};

// A derivative was requested on a box chart whose interior validity
// region would become empty.
class MarginError : public Error {
public:
  using Error::Error;
};

// Metric determinant below the singularity floor at some node.
class SingularMetricError : public Error {
public:
  using Error::Error;
};

// Violated operation precondition (wrong chart kind, bad parameter, ...).
class PreconditionError : public Error {
public:
  using Error::Error;
};

// Solver failures that are legitimate outcomes (non-convergence, kernel
// obstruction, f-floor hit).
class SolverError : public Error {
public:
  using Error::Error;
};

// Config file problems; `path` names the offending key.
class ConfigError : public Error {
public:
  ConfigError(const std::string& path, const std::string& msg)
      : Error(path.empty() ? msg : path + ": " + msg), path_(path) {}
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

// Expression syntax error with a byte offset into the source text.
class ExprParseError : public Error {
public:
  ExprParseError(std::size_t offset, const std::string& msg)
      : Error(msg + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

// Expression evaluation error (domain violation, unbound variable).
class ExprEvalError : public Error {
public:
  ExprEvalError(std::size_t offset, const std::string& msg)
      : Error(msg + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

}  // namespace wcurv

#endif
