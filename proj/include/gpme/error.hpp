#pragma once

#include <stdexcept>
#include <string>

namespace gpme {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::string context = {})
      : std::runtime_error(what), context_(std::move(context)) {}
  /// Short machine-readable tag, e.g. "invalid_argument".
  virtual const char* code() const noexcept { return "error"; }
  /// Free-form detail kept out of the one-line reason.
  const std::string& context() const noexcept { return context_; }

 private:
  std::string context_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "invalid_argument"; }
};

class UnknownNode : public Error {
 public:
  explicit UnknownNode(const std::string& id) : Error("unknown node id '" + id + "'") {}
  const char* code() const noexcept override { return "unknown_node"; }
};

/// The input lies outside the cases the existence theory covers (H1/H2/H3 or sign conditions).
class HypothesisRefusal : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "hypothesis_refusal"; }
};

/// An operation on a lazy graph would need infinitely many nodes.
class TruncationError : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "truncation"; }
};

/// An iterative solver stopped before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  const char* code() const noexcept override { return "no_convergence"; }
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

class ParseError : public Error {
 public:
  using Error::Error;
  const char* code() const noexcept override { return "parse_error"; }
};

}  // namespace gpme
