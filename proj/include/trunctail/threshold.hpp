#pragma once

#include <cstddef>
#include <functional>
#include <vector>

// Data-driven choice of k, the number of top order statistics.
//
// The selector scores every candidate k by how much the estimate trajectory
// gamma(k_min), ..., gamma(k) wanders around its median:
//
//   c(k) = (1/k) * sum_{i=k_min..k} i^theta * |gamma(i) - median_{k_min..k}|
//
// and picks the k with the smallest score.  The window at k = k_min contains
// a single point, so c(k_min) = 0 identically; scoring therefore starts at
// k_min + 1 (otherwise the degenerate window would always win).  When the
// minimum score over the scan is exactly zero - a perfectly flat trajectory,
// where every candidate is equally stable - the smallest usable threshold
// k_min is returned.  Ties in the score resolve toward the smaller k.

namespace trunctail::threshold {

struct Config {
  // Exponent of the index weight i^theta.
  double theta = 0.3;
  // Smallest usable k (at least 2: estimators need two top statistics).
  std::size_t k_min = 2;
  // Largest candidate k; must be at least k_min + 1.
  std::size_t k_max = 0;

  void validate() const;
};

struct Selection {
  std::size_t k = 0;
  double criterion = 0.0;
};

// Selects k from a trajectory vector indexed by k (entry j is the estimate
// at k = j; entries below k_min are ignored; the vector must have at least
// k_max + 1 entries).  Non-finite entries invalidate every candidate at or
// beyond the first such k - the criterion window is undefined there - so
// selection runs on the clean prefix.  Throws EstimationError when no
// candidate remains.
//
// Complexity: O(K log K) for K = k_max - k_min + 1, via order-statistic
// trees over the trajectory values.  Matches a direct rescan of the
// definition (same median convention, same tie rule) in the selected k, and
// in criterion value up to floating-point reassociation.
Selection select_k(const std::vector<double>& trajectory, const Config& cfg);

// Convenience overload: materializes trajectory[k] = gamma_at(k) for
// k = k_min..k_max, then selects as above.
Selection select_k(const std::function<double(std::size_t)>& gamma_at,
                   const Config& cfg);

}  // namespace trunctail::threshold
