// End-to-end acceptance checks.
//
// Each numbered check prints exactly one [PASS]/[FAIL] line (plus [NOTE]
// lines for per-cell detail where a check covers a grid), and the process
// exits nonzero if any check fails.  All randomness is driven by fixed
// seeds, so every number printed here is reproducible bit for bit.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "trunctail/asymptotics.hpp"
#include "trunctail/errors.hpp"
#include "trunctail/estimators.hpp"
#include "trunctail/kernels.hpp"
#include "trunctail/model.hpp"
#include "trunctail/random.hpp"
#include "trunctail/simulation.hpp"

namespace as = trunctail::asymptotics;
namespace est = trunctail::estimators;
namespace kn = trunctail::kernels;
namespace tmod = trunctail::model;
namespace rng = trunctail::rng;
namespace sim = trunctail::simulation;

namespace {

bool g_all_ok = true;

std::string strf(const char* fmt, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  return std::string(buf);
}

bool check(bool ok, const std::string& msg) {
  std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", msg.c_str());
  std::fflush(stdout);
  g_all_ok = g_all_ok && ok;
  return ok;
}

void note(const std::string& msg) {
  std::printf("[NOTE] %s\n", msg.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------------
// 1. On complete data, the kernel estimator with the indicator kernel and the
//    partial-sum tail convention must coincide with the bmn and hill
//    estimators: 100 randomized samples, n up to 200, every admissible k.
void check_1_hill_reduction() {
  std::mt19937_64 gen(101);
  double worst = 0.0;
  const kn::Kernel* ind = kn::find_kernel("indicator");
  for (int s = 0; s < 100; ++s) {
    const std::size_t n = 8 + gen() % 193;  // 8..200
    tmod::TruncationDesign d;
    d.target = tmod::BurrSpec{0.5 + 0.01 * (s % 100), 0.25};
    d.latent_size = n;
    const tmod::ObservedSample sample = tmod::sample_truncated(d, gen());
    const est::SortedView view(sample);
    for (std::size_t k = 2; k <= n - 1; ++k) {
      const double a =
          est::kernel_estimate(view, k, *ind, est::TailConvention::partial_sum)
              .gamma1_hat;
      const double b = est::bmn_estimate(view, k).gamma1_hat;
      const double h = est::hill_estimate(view, k).gamma1_hat;
      worst = std::max(
          {worst, std::abs(a - b), std::abs(b - h), std::abs(a - h)});
    }
  }
  check(worst <= 1e-12,
        strf("1. classical reduction on complete data: kernel(indicator, "
             "partial-sum) == bmn == hill for 100 samples (n in 8..200, "
             "every k); worst |difference| %.3e (tolerance 1e-12)",
             worst));
}

// ---------------------------------------------------------------------------
// 2. Library estimators against independent double-loop transcriptions on 50
//    fixed-seed truncated samples with n <= 30, every admissible k.
void check_2_naive_equivalence() {
  const kn::Kernel* ind = kn::find_kernel("indicator");
  const kn::Kernel* bi = kn::find_kernel("biweight");
  const kn::Kernel* tri = kn::find_kernel("triweight");
  double worst = 0.0;
  int samples_used = 0;
  int skipped = 0;
  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
  };
  for (int s = 0; s < 50; ++s) {
    tmod::TruncationDesign d;
    d.target = tmod::BurrSpec{0.6, 0.25};
    d.truncating =
        tmod::BurrSpec{tmod::gamma2_for_probability(0.6, 0.75), 0.25};
    d.latent_size = 30;
    const tmod::ObservedSample sample = tmod::sample_truncated(
        d, rng::derive_seed(8899, 0, static_cast<std::size_t>(s), 0));
    const std::size_t n = sample.size();
    if (n < 3) continue;
    ++samples_used;
    const est::SortedView view(sample);
    const oracle::Pairs pairs = oracle::to_pairs(sample);
    for (std::size_t k = 2; k <= n - 1; ++k) {
      for (const kn::Kernel* K : {ind, bi, tri}) {
        worst = std::max(
            worst, rel(est::kernel_estimate(view, k, *K,
                                            est::TailConvention::partial_sum)
                           .gamma1_hat,
                       oracle::kernel_est(pairs, k, *K, false)));
        try {
          worst = std::max(
              worst, rel(est::kernel_estimate(view, k, *K,
                                              est::TailConvention::product)
                             .gamma1_hat,
                         oracle::kernel_est(pairs, k, *K, true)));
        } catch (const trunctail::EstimationError&) {
          ++skipped;
        }
      }
      worst = std::max(worst, rel(est::bmn_estimate(view, k).gamma1_hat,
                                  oracle::bmn_est(pairs, k)));
      try {
        worst = std::max(worst, rel(est::gs_estimate(view, k).gamma1_hat,
                                    oracle::gs_est(pairs, k)));
      } catch (const trunctail::EstimationError&) {
        ++skipped;
      }
    }
  }
  check(worst <= 1e-12 && samples_used == 50 && skipped == 0,
        strf("2. double-loop oracle equivalence on %d truncated samples "
             "(n <= 30, every k, 3 kernels x 2 conventions + bmn + gs): "
             "worst rel. difference %.3e (tolerance 1e-12), %d degenerate "
             "skips",
             samples_used, worst, skipped));
}

// ---------------------------------------------------------------------------
// 3. Untruncated limit of the variance functional: sigma2 == gamma1^2 times
//    the squared integral of the kernel, within 1e-6 relative error.
void check_3_complete_variance() {
  struct Expect {
    const char* kernel;
    double k2;  // integral of K(s)^2 over (0,1)
  };
  const Expect table[] = {{"indicator", 1.0},
                          {"biweight", 10.0 / 7.0},
                          {"triweight", 4900.0 / 3003.0}};
  double worst = 0.0;
  bool all_present = true;
  for (double g1 : {0.6, 1.3}) {
    for (const Expect& e : table) {
      const kn::Kernel* K = kn::find_kernel(e.kernel);
      as::AsymptoticParams par;
      par.gamma1 = g1;
      const as::LimitMoments lm = as::limit_moments(par, *K);
      if (!lm.sigma2.has_value()) {
        all_present = false;
        continue;
      }
      const double want = g1 * g1 * e.k2;
      worst = std::max(worst, std::abs(*lm.sigma2 - want) / want);
    }
  }
  check(all_present && worst <= 1e-6,
        strf("3. untruncated variance limit: sigma2 == gamma1^2 * (1, 10/7, "
             "4900/3003) for indicator/biweight/triweight at gamma1 in "
             "{0.6, 1.3}; worst rel. error %.3e (tolerance 1e-6)",
             worst));
}

// ---------------------------------------------------------------------------
// 4. Two independent routes to the limiting variance on all 12 truncated
//    cells: the rearranged integrable quadrature (oracle) and the
//    Brownian-path Monte Carlo must agree within 3 MC standard errors.
//    Cells where the direct (unrearranged) integral diverges are reported.
void check_4_two_route_variance() {
  const auto t0 = std::chrono::steady_clock::now();
  int agree = 0, diverged_reported = 0, cells = 0;
  double worst_dev = 0.0;
  for (double g1 : {0.6, 0.8}) {
    for (double p : {0.7, 0.8, 0.9}) {
      for (const char* kname : {"biweight", "triweight"}) {
        ++cells;
        const kn::Kernel* K = kn::find_kernel(kname);
        const double g2 = tmod::gamma2_for_probability(g1, p);
        as::AsymptoticParams par;
        par.gamma1 = g1;
        par.gamma2 = g2;

        // Direct quadrature route: expected to refuse with a divergence
        // note on every truncated cell (the integrand's t^(-gamma2/gamma1)
        // factor is not integrable near 0 in the unrearranged form).
        const as::LimitMoments lm = as::limit_moments(par, *K);
        const bool reported = !lm.sigma2.has_value() &&
                              lm.divergence_note.find("diverge") !=
                                  std::string::npos;
        if (reported) ++diverged_reported;

        // Independent finite routes: integrable rearrangement (oracle
        // quadrature) vs Brownian-path Monte Carlo.
        const double oracle_var = oracle::derived_sigma2(g1, g2, *K);
        as::GammaProcessOptions opt;  // paths=10000, grid=4000, fixed seed
        opt.threads = 1;
        const as::GammaProcessEstimate mc =
            as::gamma_process_variance(par, *K, opt);
        const double dev = std::abs(mc.variance - oracle_var) / mc.std_error;
        worst_dev = std::max(worst_dev, dev);
        if (dev <= 3.0) ++agree;
        note(strf("4. cell gamma1=%.1f p=%.1f %-9s direct integral: %s; "
                  "rearranged quadrature sigma2=%.6f, MC %.6f +- %.6f "
                  "(%.2f se)",
                  g1, p, kname,
                  reported ? "diverges (reported)" : "FINITE (unexpected)",
                  oracle_var, mc.variance, mc.std_error, dev));
      }
    }
  }
  const double dt = seconds_since(t0);
  check(agree == cells && diverged_reported == cells && dt < 600.0,
        strf("4. two-route variance agreement: %d/%d cells within 3 MC "
             "standard errors (worst %.2f se, 10000 paths each); direct-"
             "form divergence reported in %d/%d cells; elapsed %.1fs "
             "(budget 600s)",
             agree, cells, worst_dev, diverged_reported, cells, dt));
}

// ---------------------------------------------------------------------------
// 5. Reference-table cell reproduction at N=1000 (1000 replicates,
//    biweight).  The data-driven k choice behind the published numbers is
//    not pinned down anywhere, so the selection parameters here are pinned
//    explicitly: theta=0.3, k_min=20, k_max=0.9n.  Checks 6-7 keep the
//    library defaults.
void check_5_table_cells() {
  const auto t0 = std::chrono::steady_clock::now();
  sim::Config cfg;
  cfg.gamma1 = 0.6;
  cfg.delta = 0.25;
  cfg.p_values = {0.7, 0.9};
  cfg.latent_sizes = {1000};
  cfg.replicates = 1000;
  cfg.kernels = {"biweight"};
  cfg.estimators = {"kernel"};
  cfg.master_seed = 20260816;
  cfg.rt_theta = 0.3;
  cfg.rt_k_min = 20;
  cfg.rt_k_max_fraction = 0.9;
  cfg.threads = 1;
  const sim::Report rep = sim::run_grid(cfg);

  double bias9 = -1.0, rmse9 = -1.0, rmse7 = -1.0;
  std::size_t failures = 0;
  for (const sim::CellRow& row : rep.rows) {
    failures += row.failures;
    if (row.p == 0.9) {
      bias9 = row.abs_bias;
      rmse9 = row.rmse;
    } else if (row.p == 0.7) {
      rmse7 = row.rmse;
    }
  }
  const bool ok_bias9 = std::abs(bias9 - 0.006) <= 0.03;
  const bool ok_rmse9 = std::abs(rmse9 - 0.163) <= 0.06;
  const bool ok_rmse7 = std::abs(rmse7 - 0.284) <= 0.10;
  check(ok_bias9 && ok_rmse9 && ok_rmse7 && failures == 0,
        strf("5. table cells at N=1000, biweight, 1000 replicates "
             "(k-selection pinned: theta=0.3, k_min=20, k_max=0.9n): "
             "p=0.9 abs_bias %.4f (want 0.006 +- 0.03) %s, rmse %.4f "
             "(want 0.163 +- 0.06) %s; p=0.7 rmse %.4f (want 0.284 +- "
             "0.10) %s; %zu failures; elapsed %.1fs",
             bias9, ok_bias9 ? "ok" : "OUT", rmse9, ok_rmse9 ? "ok" : "OUT",
             rmse7, ok_rmse7 ? "ok" : "OUT", failures, seconds_since(t0)));
}

// ---------------------------------------------------------------------------
// 6, 7. One full comparison grid (library-default k selection) runs at
// threads=8: qualitative bias dominance and the truncation-severity trend.
// Check 9 reruns the identical grid single-threaded and compares bytes.
const sim::CellRow* find_row(const sim::Report& rep, std::size_t latent,
                             double p, const char* estimator) {
  for (const sim::CellRow& row : rep.rows) {
    if (row.latent_size == latent && row.p == p && row.estimator == estimator) {
      return &row;
    }
  }
  return nullptr;
}

sim::Config grid_config() {
  sim::Config cfg;
  cfg.gamma1 = 0.6;
  cfg.delta = 0.25;
  cfg.p_values = {0.7, 0.8, 0.9};
  cfg.latent_sizes = {150, 200, 300, 500, 1000, 1500, 2000};
  cfg.replicates = 1000;
  cfg.kernels = {"biweight"};
  cfg.estimators = {"kernel", "bmn", "gs"};
  cfg.master_seed = 20260816;
  cfg.rt_theta = 0.3;  // library defaults, spelled out
  cfg.rt_k_min = 2;
  cfg.rt_k_max_fraction = 0.9;
  return cfg;
}

// Returns the threads=8 CSV for check 9.
std::string check_67_grid() {
  const auto t0 = std::chrono::steady_clock::now();
  sim::Config cfg8 = grid_config();
  cfg8.threads = 8;
  const sim::Report rep8 = sim::run_grid(cfg8);
  const double t_grid8 = seconds_since(t0);

  // 6. Small-sample cells: the kernel estimator should have the strictly
  //    smallest abs_bias of the three estimators in >= 80% of cells.
  int wins = 0, small_cells = 0;
  for (std::size_t latent : {150, 200, 300}) {
    for (double p : {0.7, 0.8, 0.9}) {
      ++small_cells;
      const double kb = find_row(rep8, latent, p, "kernel")->abs_bias;
      const double bb = find_row(rep8, latent, p, "bmn")->abs_bias;
      const double gb = find_row(rep8, latent, p, "gs")->abs_bias;
      if (kb < bb && kb < gb) ++wins;
    }
  }
  check(wins * 5 >= small_cells * 4,
        strf("6. small-sample bias dominance (default k selection): kernel "
             "abs_bias strictly smallest in %d/%d cells over N in "
             "{150,200,300} x p in {0.7,0.8,0.9} (need >= 80%%)",
             wins, small_cells));

  // 7. For each latent size, kernel rmse at p=0.9 <= rmse at p=0.7 in
  //    >= 80% of the sizes.
  int trend = 0, sizes = 0;
  for (std::size_t latent : {150, 200, 300, 500, 1000, 1500, 2000}) {
    ++sizes;
    const double r9 = find_row(rep8, latent, 0.9, "kernel")->rmse;
    const double r7 = find_row(rep8, latent, 0.7, "kernel")->rmse;
    if (r9 <= r7) ++trend;
  }
  check(trend * 5 >= sizes * 4,
        strf("7. truncation-severity trend (default k selection): kernel "
             "rmse(p=0.9) <= rmse(p=0.7) for %d/%d latent sizes (need >= "
             "80%%); grid elapsed %.1fs",
             trend, sizes, t_grid8));

  return sim::report_csv(rep8);
}

void check_9_determinism(const std::string& csv8) {
  const auto t1 = std::chrono::steady_clock::now();
  sim::Config cfg1 = grid_config();
  cfg1.threads = 1;
  const sim::Report rep1 = sim::run_grid(cfg1);
  const std::string csv1 = sim::report_csv(rep1);
  check(csv1 == csv8,
        strf("9. determinism: full-grid CSV byte-identical for threads=1 "
             "and threads=8 (%zu bytes, %zu rows); rerun elapsed %.1fs",
             csv8.size(), rep1.rows.size(), seconds_since(t1)));
}

// ---------------------------------------------------------------------------
// 8. Centering constant: lambda=1, tau1=-1, indicator kernel gives
//    mu = 1/2 (the first moment of the identity weight), and mu is exactly
//    linear in lambda.
void check_8_centering() {
  const kn::Kernel* ind = kn::find_kernel("indicator");
  as::AsymptoticParams par;
  par.gamma1 = 0.9;
  par.lambda = 1.0;
  par.tau1 = -1.0;
  const double mu1 = as::limit_moments(par, *ind).mu;
  const double err = std::abs(mu1 - 0.5);

  par.lambda = 2.0;
  const double mu2 = as::limit_moments(par, *ind).mu;
  par.lambda = 3.5;
  const double mu35 = as::limit_moments(par, *ind).mu;
  par.lambda = 0.0;
  const double mu0 = as::limit_moments(par, *ind).mu;
  const bool linear = (mu2 == 2.0 * mu1) && (mu35 == 3.5 * mu1) && (mu0 == 0.0);
  check(err <= 1e-10 && linear,
        strf("8. centering constant: mu(lambda=1, tau1=-1, indicator) = "
             "%.12f (|err| %.2e, tolerance 1e-10); mu exactly linear in "
             "lambda (checked at 0, 2, 3.5): %s",
             mu1, err, linear ? "yes" : "NO"));
}

// ---------------------------------------------------------------------------
// Normality sanity check: standardized sqrt(k) (estimate - gamma1) over 1000
// replicates at latent N=5000, p=0.9, biweight, fixed k=600, compared to a
// normal with fitted moments at the 1% level.
void check_normality_note() {
  const auto t0 = std::chrono::steady_clock::now();
  const kn::Kernel* bi = kn::find_kernel("biweight");
  const double gamma1 = 0.6;
  tmod::TruncationDesign d;
  d.target = tmod::BurrSpec{gamma1, 0.25};
  d.truncating =
      tmod::BurrSpec{tmod::gamma2_for_probability(gamma1, 0.9), 0.25};
  d.latent_size = 5000;
  const std::size_t k = 600;
  std::vector<double> zs;
  zs.reserve(1000);
  for (std::size_t r = 0; r < 1000; ++r) {
    const tmod::ObservedSample sample =
        tmod::sample_truncated(d, rng::derive_seed(20260816, 77, r, 0));
    const est::SortedView view(sample);
    const double g =
        est::kernel_estimate(view, k, *bi, est::TailConvention::partial_sum)
            .gamma1_hat;
    zs.push_back(std::sqrt(static_cast<double>(k)) * (g - gamma1));
  }
  double mean = 0.0;
  for (double z : zs) mean += z;
  mean /= static_cast<double>(zs.size());
  double var = 0.0;
  for (double z : zs) var += (z - mean) * (z - mean);
  var /= static_cast<double>(zs.size() - 1);
  const double ks = oracle::ks_statistic(zs, mean, std::sqrt(var));
  // Large-sample critical value for a normality test with fitted mean and
  // sd at the 1% level, n = 1000: about 1.035 / sqrt(n).
  const double crit = 0.0327;
  check(ks <= crit,
        strf("normality note: sqrt(k)(estimate - gamma1) at N=5000, p=0.9, "
             "biweight, k=600, 1000 replicates: KS vs fitted normal %.5f "
             "<= %.4f (1%% level); fitted mean %+.4f, sd %.4f; elapsed "
             "%.1fs",
             ks, crit, mean, std::sqrt(var), seconds_since(t0)));
}

}  // namespace

int main() {
  std::printf("trunctail acceptance suite\n");
  std::printf("==========================\n");
  const auto t0 = std::chrono::steady_clock::now();

  check_1_hill_reduction();
  check_2_naive_equivalence();
  check_3_complete_variance();
  check_4_two_route_variance();
  check_5_table_cells();
  const std::string grid_csv8 = check_67_grid();
  check_8_centering();
  check_9_determinism(grid_csv8);
  check_normality_note();

  std::printf("--------------------------\n");
  std::printf("acceptance: %s (total %.1fs)\n",
              g_all_ok ? "all checks passed" : "FAILURES PRESENT",
              seconds_since(t0));
  return g_all_ok ? 0 : 1;
}
