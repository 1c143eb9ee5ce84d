#include "trunctail/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "trunctail/errors.hpp"

namespace trunctail::threshold {

namespace {

// Fenwick (binary indexed) tree over double weights.
class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0.0) {}

  // 1-based index.
  void add(std::size_t idx, double v) {
    for (; idx < tree_.size(); idx += idx & (~idx + 1)) tree_[idx] += v;
  }

  // Sum over [1, idx].
  double prefix(std::size_t idx) const {
    double s = 0.0;
    for (; idx > 0; idx -= idx & (~idx + 1)) s += tree_[idx];
    return s;
  }

 private:
  std::vector<double> tree_;
};

// Fenwick tree over counts with an order-statistic descend.
class CountFenwick {
 public:
  explicit CountFenwick(std::size_t n) : tree_(n + 1, 0), log_top_(0) {
    while ((std::size_t{1} << (log_top_ + 1)) <= n) ++log_top_;
  }

  void add(std::size_t idx) {
    for (; idx < tree_.size(); idx += idx & (~idx + 1)) ++tree_[idx];
  }

  // 1-based index of the j-th smallest inserted element (j >= 1).
  std::size_t kth(std::size_t j) const {
    std::size_t pos = 0;
    for (std::size_t step = std::size_t{1} << log_top_; step > 0;
         step >>= 1) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] < j) {
        pos = next;
        j -= tree_[next];
      }
    }
    return pos + 1;
  }

 private:
  std::vector<std::size_t> tree_;
  std::size_t log_top_;
};

}  // namespace

void Config::validate() const {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw std::invalid_argument("threshold::Config: theta must be >= 0");
  }
  if (k_min < 2) {
    throw std::invalid_argument("threshold::Config: k_min must be at least 2");
  }
  if (k_max < k_min + 1) {
    throw std::invalid_argument(
        "threshold::Config: k_max must be at least k_min + 1");
  }
}

Selection select_k(const std::vector<double>& trajectory, const Config& cfg) {
  cfg.validate();
  if (trajectory.size() < cfg.k_max + 1) {
    throw std::invalid_argument(
        "select_k: trajectory shorter than k_max + 1 entries");
  }

  // Clean prefix: candidates stop before the first non-finite estimate.
  std::size_t k_last = cfg.k_max;
  for (std::size_t k = cfg.k_min; k <= cfg.k_max; ++k) {
    if (!std::isfinite(trajectory[k])) {
      k_last = k - 1;
      break;
    }
  }
  if (k_last < cfg.k_min + 1) {
    throw EstimationError(
        "select_k: no usable candidate range (trajectory undefined too "
        "early)");
  }

  const std::size_t m = k_last - cfg.k_min + 1;  // number of window entries

  // Rank the window values once (ties broken by index, so ranks are unique).
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = trajectory[cfg.k_min + a];
    const double vb = trajectory[cfg.k_min + b];
    if (va != vb) return va < vb;
    return a < b;
  });
  std::vector<std::size_t> rank(m);  // rank[idx] in [1, m]
  std::vector<double> value_at_rank(m + 1, 0.0);
  for (std::size_t pos = 0; pos < m; ++pos) {
    rank[order[pos]] = pos + 1;
    value_at_rank[pos + 1] = trajectory[cfg.k_min + order[pos]];
  }

  CountFenwick counts(m);
  Fenwick wsum(m);   // sum of i^theta
  Fenwick wvsum(m);  // sum of i^theta * gamma(i)

  auto insert = [&](std::size_t idx) {
    const std::size_t i = cfg.k_min + idx;  // the k this entry belongs to
    const double w = std::pow(static_cast<double>(i), cfg.theta);
    const double v = trajectory[i];
    counts.add(rank[idx]);
    wsum.add(rank[idx], w);
    wvsum.add(rank[idx], w * v);
  };

  insert(0);  // the k_min entry is always in the window
  double window_min = trajectory[cfg.k_min];
  double window_max = trajectory[cfg.k_min];
  double total_w = std::pow(static_cast<double>(cfg.k_min), cfg.theta);
  double total_wv = total_w * trajectory[cfg.k_min];

  std::size_t best_k = 0;
  double best_c = std::numeric_limits<double>::infinity();

  for (std::size_t k = cfg.k_min + 1; k <= k_last; ++k) {
    const std::size_t idx = k - cfg.k_min;
    insert(idx);
    const double w = std::pow(static_cast<double>(k), cfg.theta);
    total_w += w;
    total_wv += w * trajectory[k];
    window_min = std::min(window_min, trajectory[k]);
    window_max = std::max(window_max, trajectory[k]);

    double c;
    if (window_min == window_max) {
      // A flat window has zero deviation by definition; computing it from
      // the tree sums would leave rounding residue and break the exact
      // zero test below.
      c = 0.0;
    } else {
      const std::size_t mk = idx + 1;  // window size
      double median;
      std::size_t split_rank;  // inserted items at ranks <= split sit at or
                               // below the median
      if (mk % 2 == 1) {
        split_rank = counts.kth((mk + 1) / 2);
        median = value_at_rank[split_rank];
      } else {
        const std::size_t ra = counts.kth(mk / 2);
        const std::size_t rb = counts.kth(mk / 2 + 1);
        median = 0.5 * (value_at_rank[ra] + value_at_rank[rb]);
        split_rank = ra;
      }
      const double w_low = wsum.prefix(split_rank);
      const double wv_low = wvsum.prefix(split_rank);
      const double w_high = total_w - w_low;
      const double wv_high = total_wv - wv_low;
      c = (median * w_low - wv_low) + (wv_high - median * w_high);
      c = std::max(c, 0.0) / static_cast<double>(k);
    }

    if (c < best_c) {
      best_c = c;
      best_k = k;
    }
  }

  if (best_c == 0.0) {
    // Perfectly flat trajectory over the winning window: every candidate is
    // equally stable, so the smallest usable threshold wins.
    return Selection{cfg.k_min, 0.0};
  }
  return Selection{best_k, best_c};
}

Selection select_k(const std::function<double(std::size_t)>& gamma_at,
                   const Config& cfg) {
  cfg.validate();
  std::vector<double> trajectory(cfg.k_max + 1,
                                 std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = cfg.k_min; k <= cfg.k_max; ++k) {
    trajectory[k] = gamma_at(k);
  }
  return select_k(trajectory, cfg);
}

}  // namespace trunctail::threshold
