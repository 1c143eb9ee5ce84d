#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "trunctail/kernels.hpp"
#include "trunctail/model.hpp"

// Tail-index estimators for randomly right-truncated samples.
//
// Notation used throughout (n = sample size, order statistics ascending):
//   C_n(x)            empirical "at risk" fraction:
//                     (#{i: x_i <= x} - #{i: y_i < x}) / n
//   F_n(x)            product-limit distribution function for truncated
//                     data, built from C_n via an exponential product over
//                     the order statistics above x
//   a^(i)             weight attached to the i-th largest x:
//                     F_n(X_{n-i+1:n}) / C_n(X_{n-i+1:n})
//   S_n(t)            partial-sum tail estimate  (1/n) sum_{i: x_i > t} a^(i)
//
// For a sample flagged complete (every pair carries the no-truncation
// sentinel) the identity F_n == C_n holds in the idealized model, so the
// weights are a^(i) == 1 exactly; the product-form F_n stays available for
// diagnostics through product_form_weight().
//
// Two conventions are provided for the ratio fed to the smoothing kernel:
//   partial_sum (canonical): ratio_i = sum_{m<i} a^(m) / sum_{m<=k} a^(m),
//       always in [0, 1);
//   product: ratio_i = (1 - F_n(X_{n-i+1:n})) / (1 - F_n(X_{n-k:n})),
//       the same quantity up to the product-vs-sum tail discrepancy.
// The partial-sum form is the default everywhere; the switch exists for
// sensitivity analysis.

namespace trunctail::estimators {

enum class TailConvention { partial_sum, product };

const char* to_string(TailConvention c);

// Sample sorted by x with the truncation-aware empirical quantities
// precomputed at every order statistic.  Construction is O(n log n); all
// accessors are O(1) or O(log n).
class SortedView {
 public:
  explicit SortedView(const model::ObservedSample& sample);

  std::size_t size() const { return n_; }
  bool complete() const { return complete_; }

  // Ascending order statistics of the two columns (y sorted independently;
  // sentinel bounds are stored as +infinity and sort last).
  const std::vector<double>& x_order() const { return x_; }
  const std::vector<double>& y_order() const { return y_; }

  // C_n and F_n at the j-th x order statistic, 1-based (j = 1..n).
  double cn_at(std::size_t j) const;
  double fn_at(std::size_t j) const;

  // C_n at an arbitrary point.
  double empirical_c(double x) const;

  // Product-limit df / survival at an arbitrary point.
  double fn_value(double t) const;
  double survival_product(double t) const;

  // Partial-sum tail estimate S_n(t) at an arbitrary point.
  double survival_partial_sum(double t) const;

  // Weight a^(i) of the i-th largest x, 1-based (i = 1..n).  Equals 1
  // exactly for complete samples.
  double weight(std::size_t i) const;

  // sum_{m=1..i} a^(m); prefix(0) == 0.
  double weight_prefix(std::size_t i) const;

  // The Woodroofe-form ratio F_n/C_n at the i-th largest x regardless of
  // the complete flag (diagnostic; for complete samples it shows how far
  // the finite-n product form sits from the idealized weight 1).
  double product_form_weight(std::size_t i) const;

 private:
  std::size_t n_ = 0;
  bool complete_ = false;
  std::vector<double> x_;        // ascending
  std::vector<double> y_;        // ascending, +inf for sentinels
  std::vector<double> cn_;       // C_n at x_[j]
  std::vector<double> suffix_;   // suffix_[j] = sum_{m>=j} 1/(n C_n(x_[m]))
  std::vector<std::size_t> ub_;  // first index with x value > x_[j]
  std::vector<double> fn_;       // product-limit df at x_[j]
  std::vector<double> weight_;   // a^(i), index i-1
  std::vector<double> prefix_;   // prefix_[i] = sum_{m<=i} a^(m)
};

// Builds the product-limit machinery for a sample (alias for the SortedView
// constructor, named for discoverability).
SortedView woodroofe_cdf(const model::ObservedSample& sample);

// S_n at the (n-j)-th order statistic from the top: S_n(X_{n-j:n}) =
// weight_prefix(j) / n, for 0 <= j <= n-1.
double tail_mass(const SortedView& view, std::size_t j);

// Bounded view over the first `count` weights.
class TopWeights {
 public:
  TopWeights(const SortedView& view, std::size_t count);
  double a(std::size_t i) const;       // 1-based, i <= count
  double prefix(std::size_t i) const;  // 0 <= i <= count
  std::size_t count() const { return count_; }

 private:
  const SortedView* view_;
  std::size_t count_;
};

struct Diagnostics {
  std::vector<double> weights;       // a^(i), i = 1..k
  std::vector<double> ratios;        // kernel argument per i
  std::vector<double> log_excesses;  // log X_{n-i+1:n} - log X_{n-k:n}
};

struct EstimateResult {
  std::string estimator;
  std::string kernel;  // empty for kernel-free estimators
  std::size_t k = 0;
  std::size_t n = 0;
  double gamma1_hat = std::numeric_limits<double>::quiet_NaN();
  TailConvention convention = TailConvention::partial_sum;
  std::optional<Diagnostics> diagnostics;
};

// Kernel-smoothed weighted estimator of the target tail index gamma1 from
// the top k order statistics (2 <= k <= n-1):
//   sum_i a^(i) g(ratio_i) (log X_{n-i+1:n} - log X_{n-k:n}) / sum_i a^(i).
// Throws std::invalid_argument for an out-of-range k and EstimationError
// when the value is undefined on this sample.
EstimateResult kernel_estimate(const SortedView& view, std::size_t k,
                               const kernels::Kernel& kernel,
                               TailConvention convention =
                                   TailConvention::partial_sum,
                               bool with_diagnostics = false);

// Unsmoothed special case (g == 1); identical to kernel_estimate with the
// indicator kernel under the canonical convention.
EstimateResult bmn_estimate(const SortedView& view, std::size_t k,
                            TailConvention convention =
                                TailConvention::partial_sum);

// Ratio-based competitor using both columns (requires finite truncation
// bounds among the top order statistics of y):
//   Sx = sum_i log(X_{n-i+1:n}/X_{n-k:n}),  Sy analogously on y,
//   gamma1_hat = Sx Sy / (k (Sy - Sx)).
EstimateResult gs_estimate(const SortedView& view, std::size_t k);

// Classical Hill estimator applied to the x column alone (reference; it
// targets the observed-tail index, not gamma1, under truncation).
EstimateResult hill_estimate(const SortedView& view, std::size_t k);

// Complete-data kernel form, defined directly on raw observations:
//   sum_{i=1..k} (i/k) K(i/k) log(X_{n-i+1:n} / X_{n-i:n}),
// with K evaluated at its left limit at the i = k boundary term.
double cdm_kernel_estimate(std::vector<double> xs, std::size_t k,
                           const kernels::Kernel& kernel);

// Estimate trajectories over k = 2..k_max (index k of the returned vector
// holds the estimate at that k; entries 0, 1 are NaN).  Values match the
// corresponding single-k estimators to floating-point reordering accuracy;
// the kernel trajectory matches kernel_estimate exactly.
std::vector<double> kernel_trajectory(const SortedView& view,
                                      const kernels::Kernel& kernel,
                                      std::size_t k_max,
                                      TailConvention convention =
                                          TailConvention::partial_sum);
std::vector<double> bmn_trajectory(const SortedView& view, std::size_t k_max);
std::vector<double> gs_trajectory(const SortedView& view, std::size_t k_max);
std::vector<double> hill_trajectory(const SortedView& view,
                                    std::size_t k_max);

}  // namespace trunctail::estimators
