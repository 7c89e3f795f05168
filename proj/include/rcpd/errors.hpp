#pragma once

#include <stdexcept>
#include <string>

namespace rcpd {

/// Input failed a manifold, shape, or configuration check.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The log map is undefined for this pair (cut locus or singular alignment).
class DegeneratePairError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative procedure stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_gradient_norm)
      : std::runtime_error(what), last_gradient_norm_(last_gradient_norm) {}

  double last_gradient_norm() const { return last_gradient_norm_; }

 private:
  double last_gradient_norm_;
};

/// Malformed on-disk data (stream files, WAV files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rcpd
