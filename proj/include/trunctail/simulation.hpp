#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trunctail/estimators.hpp"

// Monte Carlo study harness.
//
// A grid run crosses latent sample sizes N with truncation probabilities p,
// draws `replicates` samples per cell, and reports absolute bias and RMSE of
// each configured estimator (with the data-driven threshold choice applied
// per replicate and per estimator).  All estimators see the same samples
// within a cell; failures (estimator undefined on a replicate) are excluded
// from the averages and counted.
//
// Determinism contract: the full report - including its CSV serialization -
// is byte-identical for any thread count.  Every (cell, replicate, attempt)
// triple seeds its own RNG stream, results land in preallocated per-replicate
// slots, and reductions run in replicate order with compensated summation.

namespace trunctail::simulation {

struct Config {
  // Target tail index and the shared second-order shape of both Burr laws.
  double gamma1 = 0.6;
  double delta = 0.25;
  // Truncation probabilities p = P(X <= Y); the truncating tail index is
  // derived per cell as p*gamma1/(1-p).
  std::vector<double> p_values = {0.7, 0.8, 0.9};
  // Latent sizes N (the observed n is random, roughly N*p).
  std::vector<std::size_t> latent_sizes = {1000};
  std::size_t replicates = 1000;
  std::vector<std::string> kernels = {"biweight"};
  // Estimators: "kernel" (expands over `kernels`), "bmn", "gs", "hill".
  std::vector<std::string> estimators = {"kernel", "bmn", "gs"};
  std::uint64_t master_seed = 20260816;
  // Threshold-selection settings (k_max = floor(fraction * n) per sample).
  double rt_theta = 0.3;
  std::size_t rt_k_min = 2;
  double rt_k_max_fraction = 0.9;
  estimators::TailConvention convention =
      estimators::TailConvention::partial_sum;
  // 0 = resolve at run time (TRUNCTAIL_THREADS, then hardware).
  std::size_t threads = 1;

  void validate() const;
};

// Flat "key = value" text config; '#' starts a comment.  List values are
// comma-separated.  Unknown or duplicate keys are errors.
Config parse_config(std::istream& in);
Config parse_config_file(const std::string& path);
std::string serialize_config(const Config& cfg);

struct CellRow {
  std::size_t latent_size = 0;  // N
  double mean_n = 0.0;          // mean observed sample size in the cell
  double p = 0.0;
  double gamma1 = 0.0;
  std::string kernel;     // "-" for kernel-independent estimators
  std::string estimator;  // "kernel", "bmn", "gs", "hill"
  double abs_bias = 0.0;
  double rmse = 0.0;
  std::size_t failures = 0;         // replicates where the estimate failed
  std::size_t used = 0;             // replicates entering the averages
  std::size_t empty_resamples = 0;  // extra draws after empty samples
};

struct Report {
  Config config;
  std::vector<CellRow> rows;
};

Report run_grid(const Config& cfg);

// Pinned CSV serialization with columns exactly
//   N,mean_n,p,gamma1,kernel,estimator,abs_bias,rmse,failures
// (auxiliary counters are intentionally not part of the stable format).
std::string report_csv(const Report& report);

void write_report_csv(const Report& report, const std::string& path);

// Thread count actually used for `configured`: nonzero passes through;
// zero consults the TRUNCTAIL_THREADS environment variable, then hardware
// concurrency.
std::size_t resolve_threads(std::size_t configured);

}  // namespace trunctail::simulation
