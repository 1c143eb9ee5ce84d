#pragma once

#include <functional>
#include <stdexcept>
#include <string>

// Deterministic adaptive quadrature.
//
// `integrate` is a Gauss-Kronrod 7-15 adaptive bisection rule for integrands
// that are finite on the closed interval.  `integrate_from_zero` targets
// integrands that may blow up (integrably or not) as x -> 0+: it sums the
// integral over geometrically shrinking shells [b/2^(m+1), b/2^m] and watches
// how the shell contributions behave.  For an integrable endpoint power the
// shell sums decay geometrically and the remainder can be bounded; for a
// non-integrable one they grow, which is reported as QuadratureDivergence
// rather than a number.  Divergence is a property of the requested integral,
// not a numerical failure, so it carries its own exception type with
// diagnostics attached.

namespace trunctail::quad {

struct Options {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  // Subdivision cap for one adaptive call.
  int max_intervals = 10000;
};

struct Result {
  double value = 0.0;
  // Estimated absolute error (for the shell integrator: accumulated panel
  // errors plus the geometric remainder bound).
  double error = 0.0;
  long evaluations = 0;
};

// Adaptive refinement could not reach the tolerance within the interval cap,
// or the integrand evaluated to a non-finite value.
class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what_arg)
      : std::runtime_error(what_arg) {}
};

// The integral does not exist: shell contributions near the endpoint grow
// (or refuse to decay) instead of vanishing.
class QuadratureDivergence : public std::runtime_error {
 public:
  QuadratureDivergence(const std::string& what_arg, double growth,
                       int shells, double last_shell_magnitude)
      : std::runtime_error(what_arg),
        shell_growth(growth),
        shells_examined(shells),
        last_shell(last_shell_magnitude) {}

  // Geometric mean ratio |S_m| / |S_{m-1}| over the verdict window (> 1 for
  // a growing tail; ~1 for a logarithmic one).
  double shell_growth;
  int shells_examined;
  double last_shell;
};

// Integral of f over [a, b] (a < b required).  Throws QuadratureError when
// the tolerance cannot be met or f evaluates to a non-finite value.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = Options{});

// Integral of f over (0, b] for an f that is finite on (0, b] but possibly
// singular at 0.  Throws QuadratureDivergence when the singularity is
// detected to be non-integrable, QuadratureError on other failures.
Result integrate_from_zero(const std::function<double(double)>& f, double b,
                           const Options& opts = Options{});

}  // namespace trunctail::quad
