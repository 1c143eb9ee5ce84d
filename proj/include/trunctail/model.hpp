#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

// Heavy-tailed target laws and the random right-truncation observation
// scheme.
//
// The data-generating picture: a latent pair (X, Y) of independent draws,
// X from the target law and Y from the truncating law, is observed only when
// X <= Y.  Estimation then has to recover the tail index of X from the kept
// pairs alone.  A sample may also be "complete" (no truncation): each kept
// pair then carries an explicit no-bound sentinel instead of a finite y, so
// downstream code can branch exactly rather than inferring completeness from
// the values.

namespace trunctail::model {

// Burr(gamma, delta) law on (0, inf) with survival function
//   S(x) = (1 + x^(1/delta))^(-delta/gamma).
// gamma > 0 is the tail index; delta > 0 controls how quickly the tail
// approaches an exact power law (small delta = slow approach).
struct BurrSpec {
  double gamma = 1.0;
  double delta = 0.25;

  // Throws std::invalid_argument unless both parameters are positive finite.
  void validate() const;
};

double burr_survival(const BurrSpec& spec, double x);
double burr_cdf(const BurrSpec& spec, double x);

// Inverse CDF: x = ((1-u)^(-gamma/delta) - 1)^delta for u in (0, 1).
// Throws std::invalid_argument for u outside the open interval.
double burr_quantile(const BurrSpec& spec, double u);

// Probability that a latent pair is retained, P(X <= Y), when X and Y are
// Pareto-type with tail indices gamma1 and gamma2:  gamma2 / (gamma1 + gamma2).
double truncation_probability(double gamma1, double gamma2);

// The truncating-law tail index that yields retention probability p for a
// target with tail index gamma1:  p * gamma1 / (1 - p),  p in (0, 1).
double gamma2_for_probability(double gamma1, double p);

// Tail index of the observed (truncated) x-column:
// gamma1 * gamma2 / (gamma1 + gamma2).
double observed_tail_index(double gamma1, double gamma2);

// Sampling design: `latent_size` independent latent pairs; `truncating`
// empty means no truncation (every draw is kept, pairs carry the sentinel).
struct TruncationDesign {
  BurrSpec target;
  std::optional<BurrSpec> truncating;
  std::size_t latent_size = 0;

  void validate() const;
};

// One observed pair.  `y` is the truncation bound that X was checked
// against; an empty optional is the explicit "no bound" sentinel (serialized
// as the token `inf` in CSV files).
struct ObservedPair {
  double x = 0.0;
  std::optional<double> y;
};

// A validated observed sample.  Invariants enforced at construction:
//   - non-empty;
//   - every x is finite and > 0;
//   - every present y is finite, > 0, and >= its x (a kept pair must satisfy
//     the truncation inequality).
class ObservedSample {
 public:
  explicit ObservedSample(std::vector<ObservedPair> pairs);

  std::size_t size() const { return pairs_.size(); }
  const std::vector<ObservedPair>& pairs() const { return pairs_; }

  // True when every pair carries the no-truncation sentinel.
  bool complete() const { return complete_; }

 private:
  std::vector<ObservedPair> pairs_;
  bool complete_ = false;
};

// Draws `design.latent_size` latent pairs with the given seed and returns
// the retained ones, in latent draw order.  Consumption order is fixed: one
// uniform for x, then (if the design truncates) one uniform for y, per
// latent pair.  Throws EmptySampleError when nothing is retained.
ObservedSample sample_truncated(const TruncationDesign& design,
                                std::uint64_t seed);

// Wraps raw positive observations as an untruncated sample (every pair gets
// the sentinel bound).
ObservedSample complete_data_mode(const std::vector<double>& xs);

}  // namespace trunctail::model
