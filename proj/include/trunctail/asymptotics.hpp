#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trunctail/estimators.hpp"
#include "trunctail/kernels.hpp"
#include "trunctail/quadrature.hpp"

// Large-sample theory for the kernel estimator: the centering and variance
// of the limiting Gaussian law, computed along two independent routes.
//
// Route 1 (quadrature): the variance is (gamma^2/gamma1)^2 times the squared
// L2 norm of an s-indexed functional phi, itself defined by an integral
// from 0.  For truncated parameter sets the phi integrand as stated carries
// a non-integrable power of t at 0, and the integral diverges; this library
// reports that divergence (with shell diagnostics) rather than guessing a
// repair.  In the untruncated limit (1/gamma2 == 0) the singular factor
// drops out, phi(s) reduces to K(s), and the route is fully usable.
//
// Route 2 (Monte Carlo): the same variance is the second moment of an
// explicit functional of a standard Brownian motion.  Sampling Brownian
// paths on a fine geometric grid gives an estimate with a quantified
// standard error for any admissible parameter set, truncated or not.  The
// two routes agree wherever route 1 converges, which is the cross-check the
// acceptance suite runs.

namespace trunctail::asymptotics {

struct AsymptoticParams {
  // Target-column tail index (> 0).
  double gamma1 = 1.0;
  // Truncating-column tail index; empty = untruncated limit (1/gamma2 == 0).
  std::optional<double> gamma2;
  // Scale of the second-order drift term in the centering.
  double lambda = 0.0;
  // Second-order exponent (< 0).
  double tau1 = -1.0;

  bool complete() const { return !gamma2.has_value(); }

  // Tail index of the observed x column: gamma1 gamma2 / (gamma1 + gamma2),
  // or gamma1 itself in the untruncated limit.
  double gamma() const;

  void validate() const;
};

struct PhiValue {
  double value = 0.0;
  double error = 0.0;
};

// phi(s) = (1/s) * integral over (0, s] of the variance-functional
// integrand, for s in (0, 1].  Throws quad::QuadratureDivergence when the
// integrand is not integrable at 0 (the truncated regime), and propagates
// quad::QuadratureError on numerical failure.
PhiValue phi(const AsymptoticParams& params, const kernels::Kernel& kernel,
             double s, const quad::Options& opts = quad::Options{});

struct LimitMoments {
  // Centering: lambda * integral of s^(-tau1) K(s) over (0, 1).
  double mu = 0.0;
  // Limiting variance via the phi route; empty when the phi integral
  // diverges (then divergence_note says why).
  std::optional<double> sigma2;
  // Combined quadrature error estimate for the reported numbers.
  double quadrature_error = 0.0;
  std::string divergence_note;
};

LimitMoments limit_moments(const AsymptoticParams& params,
                           const kernels::Kernel& kernel,
                           const quad::Options& opts = quad::Options{});

struct GammaProcessOptions {
  std::size_t paths = 10000;
  // Geometric time grid from grid_floor to 1.
  std::size_t grid_points = 4000;
  double grid_floor = 1e-20;
  std::uint64_t seed = 20260816;
  // 0 = one worker per hardware thread.  The result is identical for every
  // thread count: paths are seeded by index and reduced in index order.
  std::size_t threads = 1;
};

struct GammaProcessEstimate {
  double variance = 0.0;
  // Monte Carlo standard error of `variance` (Gaussian-theory approximation
  // variance * sqrt(2/(paths-1)), valid since the functional is Gaussian).
  double std_error = 0.0;
  std::size_t paths = 0;
};

// Monte Carlo estimate of the limiting variance as the second moment of the
// Brownian-path functional.  Requires gamma2 > gamma1 strictly when
// truncated: at gamma2 <= gamma1 the functional is not square-integrable
// and no finite variance exists (std::invalid_argument).
GammaProcessEstimate gamma_process_variance(
    const AsymptoticParams& params, const kernels::Kernel& kernel,
    const GammaProcessOptions& opts = GammaProcessOptions{});

// Empirical tail-process diagnostic on a sample: for each x >= 1,
//   sqrt(k) * ( tail(x * X_{n-k:n}) / tail(X_{n-k:n}) - x^(-1/gamma1_hat) ),
// with tail() the convention-selected tail estimate and gamma1_hat the
// plug-in kernel estimate at the same k.  Vanishes exactly at x = 1 and
// settles at -sqrt(k) x^(-1/gamma1_hat) beyond the largest observation.
std::vector<double> dn_process(const estimators::SortedView& view,
                               std::size_t k, const kernels::Kernel& kernel,
                               const std::vector<double>& x_values,
                               estimators::TailConvention convention =
                                   estimators::TailConvention::partial_sum);

}  // namespace trunctail::asymptotics
