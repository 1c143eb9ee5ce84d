#pragma once

#include <stdexcept>
#include <string>

namespace trunctail {

// Estimation failed on structurally valid input: degenerate ties, an
// undefined ratio, a requirement on the data (e.g. finite truncation bounds)
// that this particular sample does not meet.  Kept distinct from
// std::invalid_argument (malformed request / bad parameters) so callers can
// map "bad request" and "bad data" to different exit paths.
class EstimationError : public std::runtime_error {
 public:
  explicit EstimationError(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

// Sampling under truncation retained no observations (every latent pair was
// discarded).  Callers typically resample with a fresh seed.
class EmptySampleError : public std::runtime_error {
 public:
  explicit EmptySampleError(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

}  // namespace trunctail
