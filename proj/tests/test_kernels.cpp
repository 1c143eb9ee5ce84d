#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "oracles.hpp"
#include "trunctail/kernels.hpp"

namespace tk = trunctail::kernels;

TEST_CASE("kernel hand values") {
  const tk::Kernel& ind = tk::indicator_kernel();
  const tk::Kernel& bi = tk::biweight_kernel();
  const tk::Kernel& tri = tk::triweight_kernel();

  CHECK(ind.k(0.0) == 1.0);
  CHECK(ind.k(0.9999) == 1.0);
  CHECK(ind.k_prime(0.5) == 0.0);
  CHECK(ind.g(0.5) == 1.0);

  // biweight: K(1/2) = (15/8)(3/4)^2 = 135/128.
  CHECK(bi.k(0.5) == doctest::Approx(135.0 / 128.0).epsilon(1e-15));
  CHECK(bi.k(0.0) == doctest::Approx(15.0 / 8.0).epsilon(1e-15));
  // K'(s) = -(15/2) s (1-s^2);  K'(1/2) = -45/16.
  CHECK(bi.k_prime(0.5) == doctest::Approx(-45.0 / 16.0).epsilon(1e-15));
  // g(s) = (15/8)(1-s^2)(1-5s^2):  g(1/2) = -45/128, root at 1/sqrt(5).
  CHECK(bi.g(0.5) == doctest::Approx(-45.0 / 128.0).epsilon(1e-15));
  CHECK(bi.g(1.0 / std::sqrt(5.0)) == doctest::Approx(0.0).epsilon(1e-14));

  // triweight: K(0) = 35/16; g(s) = (35/16)(1-s^2)^2 (1-7s^2), root at
  // 1/sqrt(7).
  CHECK(tri.k(0.0) == doctest::Approx(35.0 / 16.0).epsilon(1e-15));
  CHECK(tri.g(1.0 / std::sqrt(7.0)) == doctest::Approx(0.0).epsilon(1e-14));

  CHECK(ind.k_left_limit_at_one == 1.0);
  CHECK(bi.k_left_limit_at_one == 0.0);
  CHECK(tri.k_left_limit_at_one == 0.0);
}

TEST_CASE("kernels vanish outside the support") {
  for (const std::string& name : tk::kernel_names()) {
    const tk::Kernel& K = *tk::find_kernel(name);
    for (double s : {-2.0, -1e-9, 1.0, 1.0 + 1e-9, 5.0}) {
      CHECK(K.k(s) == 0.0);
      CHECK(K.k_prime(s) == 0.0);
      CHECK(K.g(s) == 0.0);
    }
    // Just inside the right edge the kernel approaches its declared limit.
    CHECK(K.k(1.0 - 1e-9) ==
          doctest::Approx(K.k_left_limit_at_one).epsilon(1e-6));
  }
}

TEST_CASE("kernel moments match the exact binomial sums") {
  for (const std::string& name : tk::kernel_names()) {
    const tk::Kernel& K = *tk::find_kernel(name);
    // Unit mass.
    CHECK(oracle::kernel_moment(K, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // The oracle moments agree with a dense trapezoid of the actual
    // callable (checks that the closed forms describe these kernels).
    for (double m : {0.0, 0.5, 1.0, 2.0}) {
      const double quad =
          oracle::trapz([&](double s) { return std::pow(s, m) * K.k(s); },
                        1e-12, 1.0 - 1e-12, 400001);
      CHECK(oracle::kernel_moment(K, m) ==
            doctest::Approx(quad).epsilon(1e-7));
    }
  }
  // Squared norms: 1, 10/7, 4900/3003.
  CHECK(oracle::kernel_square_integral(tk::indicator_kernel()) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(oracle::kernel_square_integral(tk::biweight_kernel()) ==
        doctest::Approx(10.0 / 7.0).epsilon(1e-14));
  CHECK(oracle::kernel_square_integral(tk::triweight_kernel()) ==
        doctest::Approx(4900.0 / 3003.0).epsilon(1e-14));
}

TEST_CASE("integral of g equals the left limit of K at 1") {
  for (const std::string& name : tk::kernel_names()) {
    const tk::Kernel& K = *tk::find_kernel(name);
    const double eps = 1e-8;
    const double integral =
        oracle::trapz([&](double s) { return K.g(s); }, eps, 1.0 - eps,
                      200001);
    CHECK(integral ==
          doctest::Approx(K.k_left_limit_at_one).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("built-in kernels pass conformance") {
  for (const std::string& name : tk::kernel_names()) {
    const tk::Kernel& K = *tk::find_kernel(name);
    const tk::ConformanceReport rep = tk::conformance_check(K);
    INFO(name);
    for (const std::string& v : rep.violations) INFO(v);
    CHECK(rep.passed);
    CHECK(rep.violations.empty());
    CHECK_NOTHROW(tk::require_conformant(K));
  }
}

TEST_CASE("conformance rejects broken kernels") {
  // Wrong mass (integrates to 2).
  tk::Kernel wrong_mass = tk::indicator_kernel();
  wrong_mass.name = "double-mass";
  wrong_mass.k = [](double s) { return (s >= 0.0 && s < 1.0) ? 2.0 : 0.0; };
  wrong_mass.g = wrong_mass.k;
  wrong_mass.k_left_limit_at_one = 2.0;
  const tk::ConformanceReport mass_rep = tk::conformance_check(wrong_mass);
  CHECK_FALSE(mass_rep.passed);
  CHECK_THROWS_AS(tk::require_conformant(wrong_mass), std::invalid_argument);

  // Increasing on its support (violates monotonicity).
  tk::Kernel rising;
  rising.name = "rising";
  rising.k = [](double s) { return (s >= 0.0 && s < 1.0) ? 2.0 * s : 0.0; };
  rising.k_prime = [](double s) {
    return (s > 0.0 && s < 1.0) ? 2.0 : 0.0;
  };
  rising.g = [](double s) { return (s >= 0.0 && s < 1.0) ? 4.0 * s : 0.0; };
  rising.k_left_limit_at_one = 2.0;
  const tk::ConformanceReport rise_rep = tk::conformance_check(rising);
  CHECK_FALSE(rise_rep.passed);

  // Leaks outside the support.
  tk::Kernel leaky = tk::biweight_kernel();
  leaky.name = "leaky";
  leaky.k = [](double s) { return (s >= 0.0 && s < 2.0) ? 0.5 : 0.0; };
  leaky.g = leaky.k;
  const tk::ConformanceReport leak_rep = tk::conformance_check(leaky);
  CHECK_FALSE(leak_rep.passed);

  // Inconsistent g (not K + s K').
  tk::Kernel bad_g = tk::biweight_kernel();
  bad_g.name = "bad-g";
  bad_g.g = bad_g.k;
  const tk::ConformanceReport g_rep = tk::conformance_check(bad_g);
  CHECK_FALSE(g_rep.passed);
}

TEST_CASE("kernel lookup") {
  CHECK(tk::find_kernel("biweight") == &tk::biweight_kernel());
  CHECK(tk::find_kernel("nope") == nullptr);
  const std::vector<std::string> names = tk::kernel_names();
  REQUIRE(names.size() == 3);
  CHECK(names[0] == "indicator");
  CHECK(names[1] == "biweight");
  CHECK(names[2] == "triweight");
}
