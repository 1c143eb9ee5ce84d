#include "trunctail/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <vector>

namespace trunctail::quad {

namespace {

// Gauss-Kronrod 7-15 pair.  Abscissae are expressed on [0, 1]; weights are
// the classical values normalized to sum to 2, so a panel integral over
// [a, b] is (b - a)/2 times the weighted sum.
constexpr double kNodes[15] = {
    0.0042723144395936940576063989283284,
    0.025446043828620756865888097308925,
    0.067567788320115451661251881887438,
    0.12923440720030276995800022632466,
    0.20695638226615442611944217787823,
    0.29707742431130140792205907018797,
    0.3961075224960507457083735971537,
    0.5,
    0.6038924775039492542916264028463,
    0.7029225756886985365667896985542,
    0.79304361773384557388055782212177,
    0.87076559279969723004199977367534,
    0.93243221167988454833874811811256,
    0.97455395617137918762296067143325,
    0.99572768556040625043124236981384,
};

constexpr double kKronrodW[15] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
};

// 7-point Gauss weights, embedded at the odd Kronrod abscissae.
constexpr double kGaussW[7] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
};

Panel evaluate_panel(const std::function<double(double)>& f, double a,
                     double b, long& evaluations) {
  const double h = b - a;
  double q15 = 0.0;
  double q7 = 0.0;
  for (int j = 0; j < 15; ++j) {
    const double x = a + h * kNodes[j];
    const double y = f(x);
    ++evaluations;
    if (!std::isfinite(y)) {
      std::ostringstream os;
      os << "integrand evaluated to a non-finite value at x = " << x;
      throw QuadratureError(os.str());
    }
    q15 += kKronrodW[j] * y;
    if (j % 2 == 1) q7 += kGaussW[j / 2] * y;
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = 0.5 * h * q15;
  p.error = 0.5 * h * std::abs(q15 - q7);
  return p;
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("integrate: need finite a < b");
  }
  Result res;
  std::vector<Panel> panels;
  panels.push_back(evaluate_panel(f, a, b, res.evaluations));

  auto totals = [&panels]() {
    double v = 0.0, e = 0.0;
    for (const Panel& p : panels) {
      v += p.value;
      e += p.error;
    }
    return std::pair<double, double>(v, e);
  };

  while (true) {
    auto [value, error] = totals();
    const double goal = std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
    if (error <= goal) {
      res.value = value;
      res.error = error;
      return res;
    }
    if (static_cast<int>(panels.size()) >= opts.max_intervals) {
      std::ostringstream os;
      os << "integrate: tolerance " << goal << " not reached with "
         << panels.size() << " intervals (error estimate " << error << ")";
      throw QuadratureError(os.str());
    }
    // Split the panel with the largest error estimate.  Ties break toward
    // the leftmost panel so refinement order is deterministic.
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i) {
      if (panels[i].error > panels[worst].error) worst = i;
    }
    const Panel chosen = panels[worst];
    const double mid = 0.5 * (chosen.a + chosen.b);
    if (!(chosen.a < mid && mid < chosen.b)) {
      // The interval cannot be split further in floating point.
      std::ostringstream os;
      os << "integrate: interval [" << chosen.a << ", " << chosen.b
         << "] is not refinable further";
      throw QuadratureError(os.str());
    }
    panels[worst] = evaluate_panel(f, chosen.a, mid, res.evaluations);
    panels.push_back(evaluate_panel(f, mid, chosen.b, res.evaluations));
  }
}

Result integrate_from_zero(const std::function<double(double)>& f, double b,
                           const Options& opts) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw std::invalid_argument("integrate_from_zero: need finite b > 0");
  }

  // Shell geometry and verdict parameters.
  constexpr int kMaxShells = 1400;       // 2^-1400 is far below any double
  constexpr int kMinShellsBeforeVerdict = 6;
  constexpr int kGrowthWindow = 4;       // consecutive growing shells => diverge
  constexpr int kStagnationWindow = 64;  // shells refusing to decay => diverge
  constexpr double kFloor = 1e-290;      // stop before widths denormalize

  Options shell_opts = opts;
  shell_opts.abs_tol = std::max(opts.abs_tol / 128.0, 1e-300);
  shell_opts.rel_tol = std::min(opts.rel_tol, 1e-9);
  shell_opts.max_intervals = std::max(64, opts.max_intervals / 8);

  Result res;
  double total = 0.0;
  double err_sum = 0.0;
  std::deque<double> mags;  // |S_m| history, most recent at the back
  int grow_run = 0;
  int stagnation_run = 0;
  double hi = b;

  for (int m = 0; m < kMaxShells; ++m) {
    const double lo = 0.5 * hi;
    const Result shell = integrate(f, lo, hi, shell_opts);
    res.evaluations += shell.evaluations;
    total += shell.value;
    err_sum += shell.error;
    const double mag = std::abs(shell.value);

    if (!mags.empty()) {
      if (mag > mags.back() * 1.001 && mag > 16.0 * opts.abs_tol) {
        ++grow_run;
      } else {
        grow_run = 0;
      }
      if (mag > mags.back() * 0.999 && mag > opts.abs_tol) {
        ++stagnation_run;
      } else {
        stagnation_run = 0;
      }
    }
    mags.push_back(mag);
    if (mags.size() > 8) mags.pop_front();

    if (m + 1 >= kMinShellsBeforeVerdict) {
      if (grow_run >= kGrowthWindow) {
        const double growth = std::pow(
            mag / std::max(mags.front(), 1e-300),
            1.0 / static_cast<double>(mags.size() - 1));
        std::ostringstream os;
        os << "integral over (0, " << b
           << "] diverges at the lower endpoint: shell contributions grow by "
           << growth << "x per halving after " << (m + 1) << " shells";
        throw QuadratureDivergence(os.str(), growth, m + 1, mag);
      }
      if (stagnation_run >= kStagnationWindow) {
        std::ostringstream os;
        os << "integral over (0, " << b
           << "] diverges at the lower endpoint: shell contributions do not "
              "decay after "
           << (m + 1) << " shells (logarithmic or worse)";
        throw QuadratureDivergence(os.str(), 1.0, m + 1, mag);
      }
    }

    // Convergence: once the recent shells decay, bound the remainder by the
    // geometric tail with the (clamped) observed decay ratio.
    if (mags.size() >= 3) {
      const double m1 = mags[mags.size() - 1];
      const double m2 = mags[mags.size() - 2];
      const double m3 = mags[mags.size() - 3];
      if (m1 <= m2 && m2 <= m3) {
        double rho = 0.0;
        if (m2 > 0.0) rho = std::max(rho, m1 / m2);
        if (m3 > 0.0) rho = std::max(rho, m2 / m3);
        if (rho < 0.995) {
          const double remainder =
              (rho > 0.0) ? m1 * rho / (1.0 - rho) : 0.0;
          const double goal =
              std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
          if (remainder + err_sum <= goal) {
            res.value = total;
            res.error = remainder + err_sum;
            return res;
          }
        }
      }
    }

    hi = lo;
    if (hi < kFloor) {
      throw QuadratureError(
          "integrate_from_zero: shells reached the floating-point floor "
          "without meeting the tolerance");
    }
  }
  throw QuadratureError(
      "integrate_from_zero: shell limit exhausted without a verdict");
}

}  // namespace trunctail::quad
