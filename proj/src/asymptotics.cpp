#include "trunctail/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "trunctail/errors.hpp"
#include "trunctail/numeric.hpp"
#include "trunctail/random.hpp"

namespace trunctail::asymptotics {

double AsymptoticParams::gamma() const {
  if (complete()) return gamma1;
  return gamma1 * *gamma2 / (gamma1 + *gamma2);
}

void AsymptoticParams::validate() const {
  if (!(gamma1 > 0.0) || !std::isfinite(gamma1)) {
    throw std::invalid_argument(
        "AsymptoticParams: gamma1 must be positive finite");
  }
  if (gamma2.has_value() && (!(*gamma2 > 0.0) || !std::isfinite(*gamma2))) {
    throw std::invalid_argument(
        "AsymptoticParams: gamma2 must be positive finite when present");
  }
  if (!(tau1 < 0.0) || !std::isfinite(tau1)) {
    throw std::invalid_argument("AsymptoticParams: tau1 must be negative");
  }
  if (!std::isfinite(lambda)) {
    throw std::invalid_argument("AsymptoticParams: lambda must be finite");
  }
}

PhiValue phi(const AsymptoticParams& params, const kernels::Kernel& kernel,
             double s, const quad::Options& opts) {
  params.validate();
  if (!(s > 0.0) || !(s <= 1.0)) {
    throw std::invalid_argument("phi: s must lie in (0, 1]");
  }

  if (params.complete()) {
    // Untruncated limit: the integrand collapses to g(t) = d/dt [t K(t)],
    // which is bounded, and phi(s) reduces to K(s) analytically.
    auto f = [&kernel](double t) { return kernel.g(t); };
    const quad::Result r = quad::integrate(f, 0.0, s, opts);
    return PhiValue{r.value / s, r.error / s};
  }

  const double g1 = params.gamma1;
  const double g2 = *params.gamma2;
  const double g = params.gamma();
  const double e_outer = -g / g2;  // power of t multiplying the bracket
  const double e_arg = g / g1;     // K and K' are evaluated at t^(g/g1)
  const double e_mid = -g2 / g1;   // power of t inside the middle term
  const double c_mid = g1 / g2;

  auto f = [&](double t) {
    const double u = std::pow(t, e_arg);
    const double kv = kernel.k(u);
    const double bracket =
        kv - c_mid * std::pow(t, e_mid) * kv + u * kernel.k_prime(u);
    return std::pow(t, e_outer) * bracket;
  };
  const quad::Result r = quad::integrate_from_zero(f, s, opts);
  return PhiValue{r.value / s, r.error / s};
}

LimitMoments limit_moments(const AsymptoticParams& params,
                           const kernels::Kernel& kernel,
                           const quad::Options& opts) {
  params.validate();
  LimitMoments out;

  // Centering.  s^(-tau1) vanishes at 0 (tau1 < 0), so the integrand is
  // bounded.  The integral is computed even when lambda == 0, to surface
  // numerical problems eagerly, then scaled.
  {
    auto f = [&](double s) {
      return std::pow(s, -params.tau1) * kernel.k(s);
    };
    const quad::Result r = quad::integrate(f, 0.0, 1.0, opts);
    out.mu = params.lambda * r.value;
    out.quadrature_error = std::abs(params.lambda) * r.error;
  }

  // Variance via the phi route.  Inner integrals run at a tighter tolerance
  // so their noise stays below the outer rule's error estimates.
  quad::Options inner = opts;
  inner.abs_tol = std::min(opts.abs_tol * 1e-3, 1e-12);
  inner.rel_tol = std::min(opts.rel_tol, 1e-10);

  const double g = params.gamma();
  const double pref = (g * g / params.gamma1) * (g * g / params.gamma1);

  double max_inner_error = 0.0;
  double max_abs_phi = 0.0;
  auto f = [&](double s) {
    const PhiValue pv = phi(params, kernel, s, inner);
    max_inner_error = std::max(max_inner_error, pv.error);
    max_abs_phi = std::max(max_abs_phi, std::abs(pv.value));
    return pv.value * pv.value;
  };

  try {
    const quad::Result r = quad::integrate(f, 0.0, 1.0, opts);
    out.sigma2 = pref * r.value;
    // First-order propagation: a perturbation e of phi moves phi^2 by about
    // 2 |phi| e.
    out.quadrature_error +=
        pref * (r.error + 2.0 * max_abs_phi * max_inner_error);
  } catch (const quad::QuadratureDivergence& e) {
    out.sigma2.reset();
    out.divergence_note = e.what();
  }
  return out;
}

namespace {

// Read-only tables shared by all Monte Carlo paths.
struct PathTables {
  std::vector<double> u;      // geometric grid, floor .. 1
  std::vector<double> sq_dt;  // sqrt(u_j - u_{j-1}); sq_dt[0] = sqrt(u_0)
  std::vector<double> coef;   // gamma * u^(a-1) * g(u^a)
  std::vector<double> u_inv;  // 1/u
  std::vector<double> vq;     // u^(-b-1)  (truncated regime only)
  std::vector<double> ubm1;   // u^(b-1)   (truncated regime only)
  double a = 1.0;             // gamma/gamma1
  double b = 0.0;             // gamma/gamma2 (0 in the untruncated limit)
  double j_head = 0.0;        // u0^(-b) / (1-b): head of J under the
                              // conditional-mean (linear bridge) extension
  double j1_weight = 0.0;     // a*b*trapz(coef * u^(b-1)) multiplying J(1)
};

// One path of the Brownian functional:
//   Z = trapz over u of coef(u) * bracket(u),
//   bracket(u) = a (W(u)/u - W(1)) + a b (u^(b-1) J(u) - J(1)),
//   J(u) = integral over (0, u] of v^(-b-1) W(v) dv  (running trapezoid,
//          with the (0, u0] head taken at the bridge conditional mean).
// The -J(1) part is constant across the grid, so the loop accumulates only
// the J(u) part and the J(1) correction is applied once at the end through
// the precomputed j1_weight.
double path_value(const PathTables& t, rng::Engine& eng) {
  const std::size_t n_pts = t.u.size();
  std::vector<double> w(n_pts);
  double acc = 0.0;
  for (std::size_t j = 0; j < n_pts; ++j) {
    acc += t.sq_dt[j] * rng::normal(eng);
    w[j] = acc;
  }
  const double w1 = w[n_pts - 1];
  const bool truncated = t.b > 0.0;

  double z = 0.0;
  double h_prev = 0.0;
  double j_run = 0.0;
  double q_prev = 0.0;
  if (truncated) {
    j_run = w[0] * t.j_head;
    q_prev = t.vq[0] * w[0];
  }
  for (std::size_t j = 0; j < n_pts; ++j) {
    double bracket = t.a * (w[j] * t.u_inv[j] - w1);
    if (truncated) {
      if (j > 0) {
        const double q = t.vq[j] * w[j];
        j_run += 0.5 * (t.u[j] - t.u[j - 1]) * (q_prev + q);
        q_prev = q;
      }
      bracket += t.a * t.b * t.ubm1[j] * j_run;
    }
    const double h = t.coef[j] * bracket;
    if (j > 0) z += 0.5 * (t.u[j] - t.u[j - 1]) * (h_prev + h);
    h_prev = h;
  }
  if (truncated) {
    // j_run now holds J(1) (the grid ends at u = 1).
    z -= j_run * t.j1_weight;
  }
  return z;
}

}  // namespace

GammaProcessEstimate gamma_process_variance(const AsymptoticParams& params,
                                            const kernels::Kernel& kernel,
                                            const GammaProcessOptions& opts) {
  params.validate();
  if (!params.complete() && !(*params.gamma2 > params.gamma1)) {
    throw std::invalid_argument(
        "gamma_process_variance: requires gamma2 > gamma1 (otherwise the "
        "limit functional has no finite variance)");
  }
  if (opts.paths < 2) {
    throw std::invalid_argument("gamma_process_variance: need >= 2 paths");
  }
  if (opts.grid_points < 16) {
    throw std::invalid_argument(
        "gamma_process_variance: need >= 16 grid points");
  }
  if (!(opts.grid_floor > 0.0) || !(opts.grid_floor < 0.5)) {
    throw std::invalid_argument(
        "gamma_process_variance: grid_floor must lie in (0, 0.5)");
  }

  const double g = params.gamma();
  const double a = g / params.gamma1;
  const double b = params.complete() ? 0.0 : g / *params.gamma2;

  PathTables t;
  t.a = a;
  t.b = b;
  const std::size_t G = opts.grid_points;
  t.u.resize(G);
  t.sq_dt.resize(G);
  t.coef.resize(G);
  t.u_inv.resize(G);
  const double log_floor = std::log(opts.grid_floor);
  for (std::size_t j = 0; j < G; ++j) {
    const double frac =
        static_cast<double>(G - 1 - j) / static_cast<double>(G - 1);
    t.u[j] = std::exp(log_floor * frac);
  }
  t.u[G - 1] = 1.0;
  t.sq_dt[0] = std::sqrt(t.u[0]);
  for (std::size_t j = 1; j < G; ++j) {
    t.sq_dt[j] = std::sqrt(t.u[j] - t.u[j - 1]);
  }
  for (std::size_t j = 0; j < G; ++j) {
    const double u = t.u[j];
    t.u_inv[j] = 1.0 / u;
    t.coef[j] = g * std::pow(u, a - 1.0) * kernel.g(std::pow(u, a));
  }
  if (b > 0.0) {
    t.vq.resize(G);
    t.ubm1.resize(G);
    for (std::size_t j = 0; j < G; ++j) {
      t.vq[j] = std::pow(t.u[j], -b - 1.0);
      t.ubm1[j] = std::pow(t.u[j], b - 1.0);
    }
    t.j_head = std::pow(t.u[0], -b) / (1.0 - b);
    // The -a*b*J(1) part of the bracket is constant in u, so it integrates
    // against coef alone.
    double trapz = 0.0;
    double prev = t.coef[0];
    for (std::size_t j = 1; j < G; ++j) {
      const double cur = t.coef[j];
      trapz += 0.5 * (t.u[j] - t.u[j - 1]) * (prev + cur);
      prev = cur;
    }
    t.j1_weight = a * b * trapz;
  }

  std::vector<double> z(opts.paths);
  auto run_path = [&](std::size_t p) {
    rng::Engine eng =
        rng::make_engine(rng::derive_seed(opts.seed, p, 0x67616d6d61ull));
    return path_value(t, eng);
  };

  std::size_t workers = opts.threads;
  if (workers == 0) {
    workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  workers = std::min(workers, opts.paths);

  if (workers <= 1) {
    for (std::size_t p = 0; p < opts.paths; ++p) z[p] = run_path(p);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (opts.paths + workers - 1) / workers;
    for (std::size_t wi = 0; wi < workers; ++wi) {
      const std::size_t lo = wi * chunk;
      const std::size_t hi = std::min(opts.paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi]() {
        for (std::size_t p = lo; p < hi; ++p) z[p] = run_path(p);
      });
    }
    for (std::thread& th : pool) th.join();
  }

  // Ordered compensated reduction: identical result for any thread count.
  numeric::KahanSum sum;
  for (double v : z) sum.add(v);
  const double mean = sum.value() / static_cast<double>(opts.paths);
  numeric::KahanSum sq;
  for (double v : z) sq.add((v - mean) * (v - mean));
  const double variance = sq.value() / static_cast<double>(opts.paths - 1);

  GammaProcessEstimate out;
  out.variance = variance;
  // The functional is Gaussian, so the sample variance of P paths has
  // standard deviation variance * sqrt(2/(P-1)).
  out.std_error =
      variance * std::sqrt(2.0 / static_cast<double>(opts.paths - 1));
  out.paths = opts.paths;
  return out;
}

std::vector<double> dn_process(const estimators::SortedView& view,
                               std::size_t k, const kernels::Kernel& kernel,
                               const std::vector<double>& x_values,
                               estimators::TailConvention convention) {
  const std::size_t n = view.size();
  if (k < 2 || k + 1 > n) {
    throw std::invalid_argument("dn_process: k must lie in [2, n-1]");
  }
  for (double x : x_values) {
    if (!(x >= 1.0) || !std::isfinite(x)) {
      throw std::invalid_argument(
          "dn_process: evaluation points must be finite and >= 1");
    }
  }

  const estimators::EstimateResult est =
      estimators::kernel_estimate(view, k, kernel, convention);
  const double ghat = est.gamma1_hat;
  if (!(ghat > 0.0)) {
    throw EstimationError(
        "dn_process: kernel tail-index estimate is not positive on this "
        "sample");
  }

  const double xk = view.x_order()[n - k - 1];
  const bool partial = convention == estimators::TailConvention::partial_sum;
  const double denom =
      partial ? view.survival_partial_sum(xk) : view.survival_product(xk);
  if (!(denom > 0.0)) {
    throw EstimationError(
        "dn_process: tail estimate vanished at the threshold order "
        "statistic");
  }

  const double sqrt_k = std::sqrt(static_cast<double>(k));
  std::vector<double> out;
  out.reserve(x_values.size());
  for (double x : x_values) {
    const double tpoint = x * xk;
    const double num = partial ? view.survival_partial_sum(tpoint)
                               : view.survival_product(tpoint);
    out.push_back(sqrt_k * (num / denom - std::pow(x, -1.0 / ghat)));
  }
  return out;
}

}  // namespace trunctail::asymptotics
