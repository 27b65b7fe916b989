#pragma once

#include <stdexcept>
#include <string>

namespace confsel {

// Error taxonomy. The kind decides the CLI exit code: validation-type
// errors map to 2, numerical failures to 3.
enum class ErrorKind {
  schema,       // missing or duplicated columns
  validation,   // contract violation on inputs (non-binary treatment, bad sizes)
  data,         // non-finite or unparseable cell
  parameter,    // bad tuning parameter (negative lambda, a <= 2, ...)
  degenerate,   // constant column, single treatment arm, dof >= n
  rank,         // singular normal equations
  divergence,   // logistic separation / IRLS failure
  numerical,    // optimizer failure
  selection,    // every grid point degenerate
  study,        // too many failed replicates
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::schema: return "schema";
    case ErrorKind::validation: return "validation";
    case ErrorKind::data: return "data";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::rank: return "rank";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::selection: return "selection";
    case ErrorKind::study: return "study";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // True for failures that stem from the numerics rather than the input.
  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::divergence || kind_ == ErrorKind::numerical ||
           kind_ == ErrorKind::rank;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace confsel
