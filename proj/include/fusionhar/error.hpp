#pragma once

#include <stdexcept>
#include <string>

namespace fusionhar {

enum class ErrorKind {
  Argument,
  Schema,
  Parse,
  EmptyJoin,
  Degenerate,
  Numerical,
  Config,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::EmptyJoin: return "empty-join error";
    case ErrorKind::Degenerate: return "degenerate-model error";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace fusionhar
