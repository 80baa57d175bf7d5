#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace erckit {

enum class ErrorKind {
  Io,
  MalformedLine,
  BadManifest,
  UnknownLabel,
  DuplicateUtterance,
  BadMapping,
  EmptyClass,
  EmptyAdmissibleSet,
  MissingVector,
  Transport,
  LengthMismatch,
  BadConfig,
  UnparseableRun,
};

std::string_view to_string(ErrorKind kind);

/// All pipeline failures surface as this exception; kind() lets callers
/// branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "io error";
    case ErrorKind::MalformedLine: return "malformed line";
    case ErrorKind::BadManifest: return "bad manifest";
    case ErrorKind::UnknownLabel: return "unknown label";
    case ErrorKind::DuplicateUtterance: return "duplicate utterance";
    case ErrorKind::BadMapping: return "bad mapping";
    case ErrorKind::EmptyClass: return "empty class";
    case ErrorKind::EmptyAdmissibleSet: return "empty admissible set";
    case ErrorKind::MissingVector: return "missing vector";
    case ErrorKind::Transport: return "transport error";
    case ErrorKind::LengthMismatch: return "length mismatch";
    case ErrorKind::BadConfig: return "bad config";
    case ErrorKind::UnparseableRun: return "unparseable run";
  }
  return "error";
}

}  // namespace erckit
