// rulesynth/error.hpp - exception hierarchy shared by all modules.

#pragma once

#include <stdexcept>
#include <string>

namespace rulesynth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (interchange files, rule files, mini-language source).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) +
                             (column > 0 ? ", column " + std::to_string(column) : std::string()) + ")"
                       : what),
        message_(what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

  /// Same error with `context` (typically a file name) prepended.
  ParseError in(const std::string& context) const { return ParseError(context + ": " + message_, line_, column_); }

 private:
  std::string message_;
  int line_;
  int column_;
};

/// Well-formed text that violates a schema or a model invariant.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Mini-language construct the frontend deliberately does not handle.
class UnsupportedConstruct : public Error {
 public:
  using Error::Error;
};

/// The 0-1 solver hit a configured resource cap before proving optimality.
class SolverBudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// An alignment problem or result broke one of its structural contracts.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Merge/project were called with inputs outside their contract.
class UapdgError : public Error {
 public:
  using Error::Error;
};

/// Rule synthesis could not produce a rule consistent with its examples.
class SynthesisFailure : public Error {
 public:
  explicit SynthesisFailure(const std::string& what, std::string culprit = {})
      : Error(culprit.empty() ? what : what + " [" + culprit + "]"), culprit_(std::move(culprit)) {}

  /// Origin of the example responsible for the failure, when known.
  const std::string& culprit() const noexcept { return culprit_; }

 private:
  std::string culprit_;
};

}  // namespace rulesynth
