#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace trunctail::numeric {

// Compensated (Kahan-Neumaier) accumulator.  Used wherever a sum feeds a
// reported statistic, so that results do not depend on how the terms were
// produced (they are always added in a fixed order) and carry minimal
// rounding noise.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Mean of a vector via compensated summation; 0 for an empty input.
inline double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

}  // namespace trunctail::numeric
