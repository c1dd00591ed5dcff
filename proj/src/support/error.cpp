//===- error.cpp ----------------------------------------------------------===//

#include "polyhls/support/error.hpp"

namespace polyhls {

const char *to_string(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::Syntax:
    return "syntax error";
  case ErrorKind::Unsupported:
    return "unsupported construct";
  case ErrorKind::NonAffine:
    return "non-affine expression";
  case ErrorKind::Malformed:
    return "malformed expression";
  case ErrorKind::Unbounded:
    return "unbounded dimension";
  case ErrorKind::ArityMismatch:
    return "arity mismatch";
  case ErrorKind::NotUnimodular:
    return "non-unimodular matrix";
  case ErrorKind::IllegalTransform:
    return "illegal transformation";
  case ErrorKind::UnknownReference:
    return "unknown reference";
  case ErrorKind::InvalidArgument:
    return "invalid argument";
  case ErrorKind::Execution:
    return "execution error";
  case ErrorKind::Overflow:
    return "integer overflow";
  case ErrorKind::Internal:
    return "internal error";
  }
  return "error";
}

std::string SourceLoc::str() const {
  return std::to_string(line) + ":" + std::to_string(column);
}

Error::Error(ErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

Error::Error(ErrorKind kind, SourceLoc loc, const std::string &message)
    : std::runtime_error(loc.str() + ": " + to_string(kind) + ": " + message),
      kind_(kind) {}

void fail(ErrorKind kind, const std::string &message) {
  throw Error(kind, message);
}

} // namespace polyhls
