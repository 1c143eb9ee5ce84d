#include "trunctail/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "trunctail/errors.hpp"

namespace trunctail::estimators {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_k(std::size_t k, std::size_t n, const char* who) {
  if (k < 2) {
    throw std::invalid_argument(std::string(who) + ": k must be at least 2");
  }
  if (k + 1 > n) {
    throw std::invalid_argument(std::string(who) +
                                ": k must be at most n - 1");
  }
}

}  // namespace

const char* to_string(TailConvention c) {
  return c == TailConvention::partial_sum ? "sum" : "product";
}

SortedView::SortedView(const model::ObservedSample& sample) {
  n_ = sample.size();
  if (n_ < 2) {
    throw std::invalid_argument("SortedView: need at least two observations");
  }
  complete_ = sample.complete();

  x_.reserve(n_);
  y_.reserve(n_);
  for (const model::ObservedPair& p : sample.pairs()) {
    x_.push_back(p.x);
    y_.push_back(p.y.has_value() ? *p.y : kInf);
  }
  std::sort(x_.begin(), x_.end());
  std::sort(y_.begin(), y_.end());

  const double n_inv = 1.0 / static_cast<double>(n_);

  // C_n at each x order statistic, with value-based counts so ties are
  // handled exactly: #{x <= v} via upper_bound on x, #{y < v} via
  // lower_bound on y (sentinels are +inf and never count).
  cn_.resize(n_);
  ub_.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    const double v = x_[j];
    const auto le_x = static_cast<std::size_t>(
        std::upper_bound(x_.begin(), x_.end(), v) - x_.begin());
    const auto lt_y = static_cast<std::size_t>(
        std::lower_bound(y_.begin(), y_.end(), v) - y_.begin());
    ub_[j] = le_x;  // first index whose x value exceeds v
    // Divide rather than multiply by the precomputed reciprocal: each C_n
    // value is then the correctly rounded quotient of exact integer counts,
    // bit-for-bit reproducible by any direct transcription of the formula.
    cn_[j] = (static_cast<double>(le_x) - static_cast<double>(lt_y)) /
             static_cast<double>(n_);
    if (!(cn_[j] > 0.0)) {
      // Cannot happen for a validated sample (the point itself is at risk
      // at its own value), so treat it as a corrupted input.
      throw std::invalid_argument(
          "SortedView: empirical at-risk fraction vanished at an order "
          "statistic");
    }
  }

  // Product-limit df via suffix sums of 1/(n C_n) over strictly larger
  // order statistics: F_n(v) = exp(-sum_{x_m > v} 1/(n C_n(x_m))).
  suffix_.assign(n_ + 1, 0.0);
  for (std::size_t j = n_; j-- > 0;) {
    suffix_[j] = suffix_[j + 1] + n_inv / cn_[j];
  }
  fn_.resize(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    fn_[j] = std::exp(-suffix_[ub_[j]]);
  }

  // Weights of the i-th largest x.  Complete samples use the idealized
  // identity F_n == C_n, i.e. a^(i) == 1 exactly.
  weight_.resize(n_);
  prefix_.assign(n_ + 1, 0.0);
  for (std::size_t i = 1; i <= n_; ++i) {
    const std::size_t pos = n_ - i;
    weight_[i - 1] = complete_ ? 1.0 : fn_[pos] / cn_[pos];
    prefix_[i] = prefix_[i - 1] + weight_[i - 1];
  }
}

double SortedView::cn_at(std::size_t j) const {
  if (j < 1 || j > n_) {
    throw std::invalid_argument("cn_at: order statistic index out of range");
  }
  return cn_[j - 1];
}

double SortedView::fn_at(std::size_t j) const {
  if (j < 1 || j > n_) {
    throw std::invalid_argument("fn_at: order statistic index out of range");
  }
  return fn_[j - 1];
}

double SortedView::empirical_c(double x) const {
  const auto le_x = static_cast<std::size_t>(
      std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
  const auto lt_y = static_cast<std::size_t>(
      std::lower_bound(y_.begin(), y_.end(), x) - y_.begin());
  return (static_cast<double>(le_x) - static_cast<double>(lt_y)) /
         static_cast<double>(n_);
}

double SortedView::fn_value(double t) const {
  const auto above = static_cast<std::size_t>(
      std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
  return std::exp(-suffix_[above]);
}

double SortedView::survival_product(double t) const {
  const auto above = static_cast<std::size_t>(
      std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
  // 1 - exp(-s) evaluated stably.
  return -std::expm1(-suffix_[above]);
}

double SortedView::survival_partial_sum(double t) const {
  const auto above = static_cast<std::size_t>(
      std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
  const std::size_t m = n_ - above;  // #{x_i > t}
  return prefix_[m] / static_cast<double>(n_);
}

double SortedView::weight(std::size_t i) const {
  if (i < 1 || i > n_) {
    throw std::invalid_argument("weight: index out of range");
  }
  return weight_[i - 1];
}

double SortedView::weight_prefix(std::size_t i) const {
  if (i > n_) {
    throw std::invalid_argument("weight_prefix: index out of range");
  }
  return prefix_[i];
}

double SortedView::product_form_weight(std::size_t i) const {
  if (i < 1 || i > n_) {
    throw std::invalid_argument("product_form_weight: index out of range");
  }
  const std::size_t pos = n_ - i;
  return fn_[pos] / cn_[pos];
}

SortedView woodroofe_cdf(const model::ObservedSample& sample) {
  return SortedView(sample);
}

double tail_mass(const SortedView& view, std::size_t j) {
  if (j > view.size() - 1) {
    throw std::invalid_argument("tail_mass: j must be at most n - 1");
  }
  return view.weight_prefix(j) / static_cast<double>(view.size());
}

TopWeights::TopWeights(const SortedView& view, std::size_t count)
    : view_(&view), count_(count) {
  if (count < 1 || count > view.size()) {
    throw std::invalid_argument("TopWeights: count must lie in [1, n]");
  }
}

double TopWeights::a(std::size_t i) const {
  if (i < 1 || i > count_) {
    throw std::invalid_argument("TopWeights::a: index out of range");
  }
  return view_->weight(i);
}

double TopWeights::prefix(std::size_t i) const {
  if (i > count_) {
    throw std::invalid_argument("TopWeights::prefix: index out of range");
  }
  return view_->weight_prefix(i);
}

EstimateResult kernel_estimate(const SortedView& view, std::size_t k,
                               const kernels::Kernel& kernel,
                               TailConvention convention,
                               bool with_diagnostics) {
  const std::size_t n = view.size();
  check_k(k, n, "kernel_estimate");

  const std::vector<double>& x = view.x_order();
  const double log_xk = std::log(x[n - k - 1]);  // X_{n-k:n}
  const double denom = view.weight_prefix(k);
  if (!(denom > 0.0)) {
    throw EstimationError("kernel_estimate: weights sum to zero");
  }

  EstimateResult res;
  res.estimator = "kernel";
  res.kernel = kernel.name;
  res.k = k;
  res.n = n;
  res.convention = convention;
  if (with_diagnostics) res.diagnostics.emplace();

  double num = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const double a_i = view.weight(i);
    double ratio;
    if (convention == TailConvention::partial_sum) {
      ratio = view.weight_prefix(i - 1) / denom;
    } else {
      const double num_surv = 1.0 - view.fn_at(n - i + 1);
      const double den_surv = 1.0 - view.fn_at(n - k);
      if (!(den_surv > 0.0)) {
        throw EstimationError(
            "kernel_estimate: product-form survival vanished at the "
            "threshold order statistic");
      }
      ratio = num_surv / den_surv;
    }
    const double log_excess = std::log(x[n - i]) - log_xk;
    num += a_i * kernel.g(ratio) * log_excess;
    if (with_diagnostics) {
      res.diagnostics->weights.push_back(a_i);
      res.diagnostics->ratios.push_back(ratio);
      res.diagnostics->log_excesses.push_back(log_excess);
    }
  }

  const double value = num / denom;
  if (!std::isfinite(value)) {
    throw EstimationError(
        "kernel_estimate: estimate is not finite on this sample");
  }
  res.gamma1_hat = value;
  return res;
}

EstimateResult bmn_estimate(const SortedView& view, std::size_t k,
                            TailConvention convention) {
  const std::size_t n = view.size();
  check_k(k, n, "bmn_estimate");

  const std::vector<double>& x = view.x_order();
  const double log_xk = std::log(x[n - k - 1]);
  const double denom = view.weight_prefix(k);
  if (!(denom > 0.0)) {
    throw EstimationError("bmn_estimate: weights sum to zero");
  }

  double num = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    num += view.weight(i) * (std::log(x[n - i]) - log_xk);
  }
  const double value = num / denom;
  if (!std::isfinite(value)) {
    throw EstimationError(
        "bmn_estimate: estimate is not finite on this sample");
  }

  EstimateResult res;
  res.estimator = "bmn";
  res.k = k;
  res.n = n;
  res.convention = convention;
  res.gamma1_hat = value;
  return res;
}

EstimateResult gs_estimate(const SortedView& view, std::size_t k) {
  const std::size_t n = view.size();
  check_k(k, n, "gs_estimate");

  const std::vector<double>& x = view.x_order();
  const std::vector<double>& y = view.y_order();
  if (std::isinf(y[n - k - 1]) || std::isinf(y[n - 1])) {
    throw EstimationError(
        "gs_estimate: requires finite truncation bounds among the top order "
        "statistics");
  }

  const double log_xk = std::log(x[n - k - 1]);
  const double log_yk = std::log(y[n - k - 1]);
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    sx += std::log(x[n - i]) - log_xk;
    sy += std::log(y[n - i]) - log_yk;
  }
  const double d = sy - sx;
  if (d == 0.0) {
    throw EstimationError(
        "gs_estimate: undefined on this sample (log-sum difference is zero)");
  }
  const double value = sx * sy / (static_cast<double>(k) * d);
  if (!std::isfinite(value)) {
    throw EstimationError(
        "gs_estimate: estimate is not finite on this sample");
  }

  EstimateResult res;
  res.estimator = "gs";
  res.k = k;
  res.n = n;
  res.gamma1_hat = value;
  return res;
}

EstimateResult hill_estimate(const SortedView& view, std::size_t k) {
  const std::size_t n = view.size();
  check_k(k, n, "hill_estimate");

  const std::vector<double>& x = view.x_order();
  const double log_xk = std::log(x[n - k - 1]);
  double num = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    num += std::log(x[n - i]) - log_xk;
  }
  const double value = num / static_cast<double>(k);

  EstimateResult res;
  res.estimator = "hill";
  res.k = k;
  res.n = n;
  res.gamma1_hat = value;
  return res;
}

double cdm_kernel_estimate(std::vector<double> xs, std::size_t k,
                           const kernels::Kernel& kernel) {
  const std::size_t n = xs.size();
  if (n < 2) {
    throw std::invalid_argument(
        "cdm_kernel_estimate: need at least two observations");
  }
  check_k(k, n, "cdm_kernel_estimate");
  for (double v : xs) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      throw std::invalid_argument(
          "cdm_kernel_estimate: observations must be positive finite");
    }
  }
  std::sort(xs.begin(), xs.end());

  const double kd = static_cast<double>(k);
  double sum = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const double s = static_cast<double>(i) / kd;
    // The i = k term sits at the right edge of the kernel support; it is
    // weighted by the left limit of K at 1 (nonzero only for kernels that
    // do not vanish at the edge, e.g. the indicator).
    const double kv = (i == k) ? kernel.k_left_limit_at_one : kernel.k(s);
    const double spacing = std::log(xs[n - i]) - std::log(xs[n - i - 1]);
    sum += s * kv * spacing;
  }
  if (!std::isfinite(sum)) {
    throw EstimationError(
        "cdm_kernel_estimate: estimate is not finite on this sample");
  }
  return sum;
}

std::vector<double> kernel_trajectory(const SortedView& view,
                                      const kernels::Kernel& kernel,
                                      std::size_t k_max,
                                      TailConvention convention) {
  const std::size_t n = view.size();
  check_k(k_max, n, "kernel_trajectory");

  const std::vector<double>& x = view.x_order();
  std::vector<double> lg(k_max + 2);
  for (std::size_t i = 1; i <= k_max + 1; ++i) lg[i] = std::log(x[n - i]);

  std::vector<double> out(k_max + 1, kNaN);
  for (std::size_t k = 2; k <= k_max; ++k) {
    const double denom = view.weight_prefix(k);
    const double log_xk = lg[k + 1];
    double den_surv = 0.0;
    if (convention == TailConvention::product) {
      den_surv = 1.0 - view.fn_at(n - k);
      if (!(den_surv > 0.0)) continue;  // leave NaN: undefined at this k
    }
    double num = 0.0;
    for (std::size_t i = 1; i <= k; ++i) {
      double ratio;
      if (convention == TailConvention::partial_sum) {
        ratio = view.weight_prefix(i - 1) / denom;
      } else {
        ratio = (1.0 - view.fn_at(n - i + 1)) / den_surv;
      }
      num += view.weight(i) * kernel.g(ratio) * (lg[i] - log_xk);
    }
    out[k] = num / denom;
  }
  return out;
}

std::vector<double> bmn_trajectory(const SortedView& view,
                                   std::size_t k_max) {
  const std::size_t n = view.size();
  check_k(k_max, n, "bmn_trajectory");

  const std::vector<double>& x = view.x_order();
  std::vector<double> out(k_max + 1, kNaN);
  // Incremental form: num(k) = sum_i a_i lg_i - prefix(k) lg_{k+1}.
  double weighted_log_sum = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    weighted_log_sum += view.weight(k) * std::log(x[n - k]);
    if (k < 2) continue;
    const double prefix = view.weight_prefix(k);
    const double log_xk = std::log(x[n - k - 1]);
    out[k] = (weighted_log_sum - prefix * log_xk) / prefix;
  }
  return out;
}

std::vector<double> gs_trajectory(const SortedView& view, std::size_t k_max) {
  const std::size_t n = view.size();
  check_k(k_max, n, "gs_trajectory");

  const std::vector<double>& x = view.x_order();
  const std::vector<double>& y = view.y_order();
  if (std::isinf(y[n - k_max - 1]) || std::isinf(y[n - 1])) {
    throw EstimationError(
        "gs_trajectory: requires finite truncation bounds among the top "
        "order statistics");
  }

  std::vector<double> out(k_max + 1, kNaN);
  double sum_lx = 0.0;
  double sum_ly = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    sum_lx += std::log(x[n - k]);
    sum_ly += std::log(y[n - k]);
    if (k < 2) continue;
    const double kd = static_cast<double>(k);
    const double sx = sum_lx - kd * std::log(x[n - k - 1]);
    const double sy = sum_ly - kd * std::log(y[n - k - 1]);
    const double d = sy - sx;
    if (d == 0.0) continue;  // leave NaN: undefined at this k
    const double value = sx * sy / (kd * d);
    out[k] = std::isfinite(value) ? value : kNaN;
  }
  return out;
}

std::vector<double> hill_trajectory(const SortedView& view,
                                    std::size_t k_max) {
  const std::size_t n = view.size();
  check_k(k_max, n, "hill_trajectory");

  const std::vector<double>& x = view.x_order();
  std::vector<double> out(k_max + 1, kNaN);
  double sum_lx = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    sum_lx += std::log(x[n - k]);
    if (k < 2) continue;
    const double kd = static_cast<double>(k);
    out[k] = (sum_lx - kd * std::log(x[n - k - 1])) / kd;
  }
  return out;
}

}  // namespace trunctail::estimators
