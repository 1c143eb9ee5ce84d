#include "trunctail/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "trunctail/errors.hpp"
#include "trunctail/random.hpp"

namespace trunctail::model {

void BurrSpec::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("BurrSpec: gamma must be positive finite");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("BurrSpec: delta must be positive finite");
  }
}

double burr_survival(const BurrSpec& spec, double x) {
  spec.validate();
  if (!(x > 0.0)) return 1.0;
  // (1 + x^(1/delta))^(-delta/gamma), evaluated in log space for stability.
  const double t = std::pow(x, 1.0 / spec.delta);
  return std::exp(-(spec.delta / spec.gamma) * std::log1p(t));
}

double burr_cdf(const BurrSpec& spec, double x) {
  spec.validate();
  if (!(x > 0.0)) return 0.0;
  const double t = std::pow(x, 1.0 / spec.delta);
  // 1 - S(x) computed as -expm1(log S(x)) to keep precision near 0.
  return -std::expm1(-(spec.delta / spec.gamma) * std::log1p(t));
}

double burr_quantile(const BurrSpec& spec, double u) {
  spec.validate();
  if (!(u > 0.0) || !(u < 1.0)) {
    throw std::invalid_argument("burr_quantile: u must lie in (0, 1)");
  }
  // ((1-u)^(-gamma/delta) - 1)^delta.  The inner expression is computed as
  // expm1(-(gamma/delta) * log1p(-u)) so it stays positive (and accurate)
  // for u arbitrarily close to 0.
  const double inner = std::expm1(-(spec.gamma / spec.delta) * std::log1p(-u));
  return std::pow(inner, spec.delta);
}

double truncation_probability(double gamma1, double gamma2) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0) || !std::isfinite(gamma1) ||
      !std::isfinite(gamma2)) {
    throw std::invalid_argument(
        "truncation_probability: tail indices must be positive finite");
  }
  return gamma2 / (gamma1 + gamma2);
}

double gamma2_for_probability(double gamma1, double p) {
  if (!(gamma1 > 0.0) || !std::isfinite(gamma1)) {
    throw std::invalid_argument(
        "gamma2_for_probability: gamma1 must be positive finite");
  }
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument(
        "gamma2_for_probability: p must lie in (0, 1)");
  }
  return p * gamma1 / (1.0 - p);
}

double observed_tail_index(double gamma1, double gamma2) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) {
    throw std::invalid_argument(
        "observed_tail_index: tail indices must be positive");
  }
  return gamma1 * gamma2 / (gamma1 + gamma2);
}

void TruncationDesign::validate() const {
  target.validate();
  if (truncating) truncating->validate();
  if (latent_size == 0) {
    throw std::invalid_argument("TruncationDesign: latent_size must be >= 1");
  }
}

ObservedSample::ObservedSample(std::vector<ObservedPair> pairs)
    : pairs_(std::move(pairs)) {
  if (pairs_.empty()) {
    throw std::invalid_argument("ObservedSample: sample is empty");
  }
  bool all_sentinel = true;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const ObservedPair& p = pairs_[i];
    if (!std::isfinite(p.x) || !(p.x > 0.0)) {
      throw std::invalid_argument(
          "ObservedSample: x must be positive finite at row " +
          std::to_string(i + 1));
    }
    if (p.y.has_value()) {
      all_sentinel = false;
      if (!std::isfinite(*p.y) || !(*p.y > 0.0)) {
        throw std::invalid_argument(
            "ObservedSample: y must be positive finite (or the no-bound "
            "sentinel) at row " +
            std::to_string(i + 1));
      }
      if (p.x > *p.y) {
        throw std::invalid_argument(
            "ObservedSample: x exceeds its truncation bound y at row " +
            std::to_string(i + 1));
      }
    }
  }
  complete_ = all_sentinel;
}

ObservedSample sample_truncated(const TruncationDesign& design,
                                std::uint64_t seed) {
  design.validate();
  rng::Engine eng = rng::make_engine(seed);
  std::vector<ObservedPair> kept;
  kept.reserve(design.latent_size);
  for (std::size_t i = 0; i < design.latent_size; ++i) {
    const double x = burr_quantile(design.target, rng::unit_open(eng));
    if (!design.truncating) {
      kept.push_back(ObservedPair{x, std::nullopt});
      continue;
    }
    const double y = burr_quantile(*design.truncating, rng::unit_open(eng));
    if (x <= y) kept.push_back(ObservedPair{x, y});
  }
  if (kept.empty()) {
    throw EmptySampleError(
        "sample_truncated: every latent pair was truncated; resample with a "
        "fresh seed");
  }
  return ObservedSample(std::move(kept));
}

ObservedSample complete_data_mode(const std::vector<double>& xs) {
  std::vector<ObservedPair> pairs;
  pairs.reserve(xs.size());
  for (double x : xs) pairs.push_back(ObservedPair{x, std::nullopt});
  return ObservedSample(std::move(pairs));
}

}  // namespace trunctail::model
