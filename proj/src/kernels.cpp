#include "trunctail/kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "trunctail/quadrature.hpp"

namespace trunctail::kernels {

namespace {

bool in_support(double s) { return s >= 0.0 && s < 1.0; }

double indicator_k(double s) { return in_support(s) ? 1.0 : 0.0; }
double indicator_kp(double /*s*/) { return 0.0; }
double indicator_g(double s) { return in_support(s) ? 1.0 : 0.0; }

// biweight: K(s) = (15/8) (1 - s^2)^2
double biweight_k(double s) {
  if (!in_support(s)) return 0.0;
  const double w = 1.0 - s * s;
  return 1.875 * w * w;
}
double biweight_kp(double s) {
  if (!in_support(s)) return 0.0;
  return -7.5 * s * (1.0 - s * s);
}
double biweight_g(double s) {
  if (!in_support(s)) return 0.0;
  const double s2 = s * s;
  return 1.875 * (1.0 - s2) * (1.0 - 5.0 * s2);
}

// triweight: K(s) = (35/16) (1 - s^2)^3
double triweight_k(double s) {
  if (!in_support(s)) return 0.0;
  const double w = 1.0 - s * s;
  return 2.1875 * w * w * w;
}
double triweight_kp(double s) {
  if (!in_support(s)) return 0.0;
  const double w = 1.0 - s * s;
  return -13.125 * s * w * w;
}
double triweight_g(double s) {
  if (!in_support(s)) return 0.0;
  const double s2 = s * s;
  const double w = 1.0 - s2;
  return 2.1875 * w * w * (1.0 - 7.0 * s2);
}

}  // namespace

const Kernel& indicator_kernel() {
  static const Kernel k{"indicator", indicator_k, indicator_kp, indicator_g,
                        1.0};
  return k;
}

const Kernel& biweight_kernel() {
  static const Kernel k{"biweight", biweight_k, biweight_kp, biweight_g, 0.0};
  return k;
}

const Kernel& triweight_kernel() {
  static const Kernel k{"triweight", triweight_k, triweight_kp, triweight_g,
                        0.0};
  return k;
}

const Kernel* find_kernel(const std::string& name) {
  if (name == "indicator") return &indicator_kernel();
  if (name == "biweight") return &biweight_kernel();
  if (name == "triweight") return &triweight_kernel();
  return nullptr;
}

std::vector<std::string> kernel_names() {
  return {"indicator", "biweight", "triweight"};
}

ConformanceReport conformance_check(const Kernel& kernel,
                                    std::size_t grid_points) {
  ConformanceReport report;
  auto fail = [&report](const std::string& msg) {
    report.violations.push_back(msg);
  };

  if (!kernel.k || !kernel.k_prime || !kernel.g) {
    fail("structural: kernel callables must all be set");
    report.passed = false;
    return report;
  }
  if (grid_points < 16) grid_points = 16;
  const std::size_t n = grid_points;

  // --- C1: non-negative and non-increasing on [0, 1). -----------------
  {
    bool monotone = true;
    bool nonneg = true;
    double prev = kernel.k(0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(n);
      const double v = kernel.k(s);
      if (!(v >= -1e-12)) nonneg = false;
      if (j > 0 && v > prev + 1e-10) monotone = false;
      prev = v;
    }
    if (!nonneg) fail("C1: kernel takes negative values on [0, 1)");
    if (!monotone) fail("C1: kernel is not non-increasing on [0, 1)");
  }

  // --- C2: support confined to [0, 1). ---------------------------------
  {
    const double outside[] = {-2.0, -0.25, 1.0, 1.25, 10.0};
    for (double s : outside) {
      if (kernel.k(s) != 0.0) {
        fail("C2: kernel does not vanish outside [0, 1)");
        break;
      }
    }
    for (double s : outside) {
      if (kernel.g(s) != 0.0) {
        fail("C2: g does not vanish outside [0, 1)");
        break;
      }
    }
  }

  // --- C3: unit mass on (0, 1). ----------------------------------------
  {
    quad::Options opts;
    opts.abs_tol = 1e-11;
    opts.rel_tol = 1e-11;
    try {
      const quad::Result r = quad::integrate(kernel.k, 0.0, 1.0, opts);
      if (std::abs(r.value - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "C3: kernel mass is " << r.value << ", expected 1";
        fail(os.str());
      }
    } catch (const std::exception& e) {
      fail(std::string("C3: could not integrate kernel: ") + e.what());
    }
  }

  // --- C4: boundedness of K, K', g; consistency of the callables. ------
  {
    constexpr double kBound = 1e6;
    bool bounded = true;
    bool g_consistent = true;
    for (std::size_t j = 0; j < n; ++j) {
      const double s =
          (static_cast<double>(j) + 0.5) / static_cast<double>(n);
      const double kv = kernel.k(s);
      const double kp = kernel.k_prime(s);
      const double gv = kernel.g(s);
      if (!std::isfinite(kv) || !std::isfinite(kp) || !std::isfinite(gv) ||
          std::abs(kv) > kBound || std::abs(kp) > kBound ||
          std::abs(gv) > kBound) {
        bounded = false;
      }
      if (std::abs(gv - (kv + s * kp)) >
          1e-8 * (1.0 + std::abs(kv) + std::abs(s * kp))) {
        g_consistent = false;
      }
    }
    if (!bounded) fail("C4: kernel, derivative, or g unbounded on (0, 1)");
    if (!g_consistent) {
      fail("structural: g(s) must equal K(s) + s K'(s) on (0, 1)");
    }

    // Derivative consistency: K' against a central difference of K, away
    // from the support edges (where one-sided limits would contaminate the
    // stencil) by a safe margin.
    const double h = 1e-6;
    double max_scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double s =
          (static_cast<double>(j) + 0.5) / static_cast<double>(n);
      max_scale = std::max(max_scale, std::abs(kernel.k_prime(s)));
    }
    bool deriv_ok = true;
    for (std::size_t j = 0; j < n; ++j) {
      const double s =
          (static_cast<double>(j) + 0.5) / static_cast<double>(n);
      if (s < 16.0 * h || s > 1.0 - 16.0 * h) continue;
      const double fd = (kernel.k(s + h) - kernel.k(s - h)) / (2.0 * h);
      if (std::abs(fd - kernel.k_prime(s)) > 1e-4 * max_scale) {
        deriv_ok = false;
        break;
      }
    }
    if (!deriv_ok) {
      fail("C4: declared derivative disagrees with a finite difference of "
           "the kernel");
    }
  }

  // --- Integral identity: the mass of g equals the declared left limit of
  // K at 1.  (Follows from g = (sK)' and K(0+) finite.)
  {
    quad::Options opts;
    opts.abs_tol = 1e-11;
    opts.rel_tol = 1e-11;
    try {
      const quad::Result r = quad::integrate(kernel.g, 0.0, 1.0, opts);
      if (std::abs(r.value - kernel.k_left_limit_at_one) > 1e-8) {
        std::ostringstream os;
        os << "structural: integral of g is " << r.value
           << " but the declared left limit of K at 1 is "
           << kernel.k_left_limit_at_one;
        fail(os.str());
      }
    } catch (const std::exception& e) {
      fail(std::string("structural: could not integrate g: ") + e.what());
    }
  }

  report.passed = report.violations.empty();
  return report;
}

void require_conformant(const Kernel& kernel) {
  const ConformanceReport report = conformance_check(kernel);
  if (report.passed) return;
  std::ostringstream os;
  os << "kernel '" << kernel.name << "' failed conformance:";
  for (const std::string& v : report.violations) os << "\n  - " << v;
  throw std::invalid_argument(os.str());
}

}  // namespace trunctail::kernels
