#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

// Error kinds map one-to-one onto the CLI exit codes (see tools/nlslab.cpp).
// invalid-argument and out-of-range reuse the standard exceptions.

class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what, double last_residual = 0.0)
      : std::runtime_error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

class HypothesisNotMet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlslab
