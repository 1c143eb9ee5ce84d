#pragma once

#include <functional>
#include <string>
#include <vector>

// Smoothing kernels on [0, 1) and their conformance contract.
//
// Estimation code in this library assumes four conditions of any kernel it
// is handed (the "C1..C4 conformance conditions" checked by
// conformance_check):
//   C1  K is non-negative and non-increasing on [0, 1);
//   C2  K vanishes outside [0, 1);
//   C3  K integrates to exactly 1 over (0, 1);
//   C4  K, its derivative K', and g(s) = d/ds [ s K(s) ] = K(s) + s K'(s)
//       are bounded on (0, 1).
// A useful identity that follows: the integral of g over (0, 1) equals the
// left limit of s K(s) at 1, i.e. lim_{s->1^-} K(s).  That limit is 1 for
// the indicator kernel and 0 for the smooth polynomial kernels.

namespace trunctail::kernels {

struct Kernel {
  std::string name;

  // K(s); must return 0 outside [0, 1).
  std::function<double(double)> k;

  // K'(s) on (0, 1); 0 outside.
  std::function<double(double)> k_prime;

  // g(s) = K(s) + s K'(s); 0 outside [0, 1).
  std::function<double(double)> g;

  // lim_{s -> 1^-} K(s).  Needed by the complete-data kernel form, which
  // weights its last spacing by this limit, and by the integral identity
  // above.
  double k_left_limit_at_one = 0.0;
};

// Outcome of checking the C1..C4 conditions (plus the structural
// consistency of the three callables with one another).  `violations`
// contains one human-readable message per failed check, each naming the
// condition it belongs to.
struct ConformanceReport {
  bool passed = false;
  std::vector<std::string> violations;
};

// Grid-and-quadrature based check of the conditions above.  `grid_points`
// controls the resolution of the pointwise checks.
ConformanceReport conformance_check(const Kernel& kernel,
                                    std::size_t grid_points = 2001);

// Throws std::invalid_argument with the joined violation messages when the
// kernel does not conform.
void require_conformant(const Kernel& kernel);

// Built-in kernels.
//
// indicator:  K(s) = 1 on [0, 1)                        (no smoothing)
// biweight:   K(s) = (15/8) (1 - s^2)^2 on [0, 1)
// triweight:  K(s) = (35/16) (1 - s^2)^3 on [0, 1)
const Kernel& indicator_kernel();
const Kernel& biweight_kernel();
const Kernel& triweight_kernel();

// Lookup by name ("indicator", "biweight", "triweight"); nullptr when
// unknown.
const Kernel* find_kernel(const std::string& name);

std::vector<std::string> kernel_names();

}  // namespace trunctail::kernels
