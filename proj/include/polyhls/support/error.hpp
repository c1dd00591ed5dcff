//===- error.hpp - Error reporting ------------------------------*- C++ -*-===//
//
// All failures in the library are reported by throwing polyhls::Error. The
// kind decides how the driver reports it: user errors exit with 1, internal
// invariant violations with 2.
//
//===----------------------------------------------------------------------===//

#pragma once

#include <stdexcept>
#include <string>

namespace polyhls {

enum class ErrorKind {
  Syntax,
  Unsupported,
  NonAffine,
  Malformed,
  Unbounded,
  ArityMismatch,
  NotUnimodular,
  IllegalTransform,
  UnknownReference,
  InvalidArgument,
  Execution,
  Overflow,
  Internal,
};

const char *to_string(ErrorKind kind);

struct SourceLoc {
  int line = 0;
  int column = 0;

  std::string str() const;
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message);
  Error(ErrorKind kind, SourceLoc loc, const std::string &message);

  ErrorKind kind() const { return kind_; }

  /// Internal errors indicate a bug in the compiler rather than bad input.
  bool is_internal() const {
    return kind_ == ErrorKind::Internal || kind_ == ErrorKind::Overflow;
  }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string &message);

} // namespace polyhls
