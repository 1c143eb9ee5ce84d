// trunctail: tail-index estimation for randomly right-truncated heavy-tailed
// data.
//
// Subcommands:
//   estimate     estimate gamma1 from a CSV sample (auto or fixed k)
//   simulate     run a Monte Carlo grid from a config file
//   asymptotics  limiting centering/variance via quadrature and Monte Carlo
//   selftest     quick built-in consistency checks
//
// Exit codes: 0 success; 1 selftest failure; 2 usage or input error;
// 3 estimator domain error (structurally valid data on which the requested
// quantity is undefined).

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "trunctail/asymptotics.hpp"
#include "trunctail/errors.hpp"
#include "trunctail/estimators.hpp"
#include "trunctail/io.hpp"
#include "trunctail/kernels.hpp"
#include "trunctail/model.hpp"
#include "trunctail/quadrature.hpp"
#include "trunctail/random.hpp"
#include "trunctail/simulation.hpp"
#include "trunctail/threshold.hpp"

namespace {

using nlohmann::json;
namespace tt = trunctail;

struct EstimateArgs {
  std::string input;
  std::string estimator = "kernel";
  std::string kernel = "biweight";
  std::size_t k = 0;  // 0 = select automatically
  std::size_t k_max = 0;
  double theta = 0.3;
  std::size_t k_min = 2;
  double k_max_fraction = 0.9;
  std::string convention = "sum";
  bool as_json = false;
  std::string dn_dump;
  std::size_t dn_points = 200;
};

struct SimulateArgs {
  std::string config_path;
  std::string output;
  std::size_t threads = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

struct AsymptoticsArgs {
  double gamma1 = 0.6;
  std::string gamma2 = "inf";
  double p = 0.0;
  bool p_given = false;
  double lambda = 0.0;
  double tau1 = -1.0;
  std::string kernel = "biweight";
  std::size_t paths = 10000;
  std::size_t grid_points = 4000;
  double grid_floor = 1e-20;
  std::uint64_t seed = 20260816;
  std::size_t threads = 0;
};

tt::estimators::TailConvention parse_convention(const std::string& s) {
  if (s == "sum") return tt::estimators::TailConvention::partial_sum;
  if (s == "product") return tt::estimators::TailConvention::product;
  throw std::invalid_argument("tail convention must be 'sum' or 'product'");
}

const tt::kernels::Kernel& kernel_or_throw(const std::string& name) {
  const tt::kernels::Kernel* k = tt::kernels::find_kernel(name);
  if (!k) {
    throw std::invalid_argument("unknown kernel '" + name +
                                "' (expected indicator, biweight, or "
                                "triweight)");
  }
  return *k;
}

int run_estimate(const EstimateArgs& args) {
  const tt::model::ObservedSample sample =
      tt::io::read_sample_csv_file(args.input);
  const tt::estimators::SortedView view(sample);
  const std::size_t n = view.size();
  const tt::estimators::TailConvention conv =
      parse_convention(args.convention);
  const tt::kernels::Kernel& kernel = kernel_or_throw(args.kernel);

  if (args.estimator != "kernel" && !args.dn_dump.empty()) {
    throw std::invalid_argument(
        "--dn-dump is only available with --estimator kernel");
  }

  std::size_t k = args.k;
  bool auto_k = (k == 0);
  if (!auto_k && (k < 2 || k + 1 > n)) {
    throw std::invalid_argument(
        "k must lie in [2, n-1]; n = " + std::to_string(n));
  }

  if (auto_k) {
    std::size_t k_max = args.k_max;
    if (k_max == 0) {
      k_max = static_cast<std::size_t>(
          std::floor(args.k_max_fraction * static_cast<double>(n)));
    }
    k_max = std::min(k_max, n - 1);
    if (k_max < args.k_min + 1) {
      throw std::invalid_argument(
          "sample too small for automatic threshold selection");
    }
    tt::threshold::Config tcfg;
    tcfg.theta = args.theta;
    tcfg.k_min = args.k_min;
    tcfg.k_max = k_max;

    std::vector<double> traj;
    if (args.estimator == "kernel") {
      traj = tt::estimators::kernel_trajectory(view, kernel, k_max, conv);
    } else if (args.estimator == "bmn") {
      traj = tt::estimators::bmn_trajectory(view, k_max);
    } else if (args.estimator == "gs") {
      traj = tt::estimators::gs_trajectory(view, k_max);
    } else if (args.estimator == "hill") {
      traj = tt::estimators::hill_trajectory(view, k_max);
    } else {
      throw std::invalid_argument("unknown estimator '" + args.estimator +
                                  "'");
    }
    k = tt::threshold::select_k(traj, tcfg).k;
  }

  tt::estimators::EstimateResult res;
  if (args.estimator == "kernel") {
    res = tt::estimators::kernel_estimate(view, k, kernel, conv);
  } else if (args.estimator == "bmn") {
    res = tt::estimators::bmn_estimate(view, k, conv);
  } else if (args.estimator == "gs") {
    res = tt::estimators::gs_estimate(view, k);
  } else if (args.estimator == "hill") {
    res = tt::estimators::hill_estimate(view, k);
  } else {
    throw std::invalid_argument("unknown estimator '" + args.estimator + "'");
  }

  if (!args.dn_dump.empty()) {
    const double x_top = view.x_order()[n - 1];
    const double x_k = view.x_order()[n - k - 1];
    const double hi = 1.2 * x_top / x_k;
    const std::size_t points = std::max<std::size_t>(args.dn_points, 2);
    std::vector<double> xs(points);
    const double log_hi = std::log(hi);
    for (std::size_t i = 0; i < points; ++i) {
      xs[i] = std::exp(log_hi * static_cast<double>(i) /
                       static_cast<double>(points - 1));
    }
    xs[0] = 1.0;
    const std::vector<double> dn =
        tt::asymptotics::dn_process(view, k, kernel, xs, conv);
    std::ofstream out(args.dn_dump, std::ios::binary);
    if (!out) {
      throw std::invalid_argument("cannot open '" + args.dn_dump +
                                  "' for writing");
    }
    tt::io::write_dn_csv(out, xs, dn);
  }

  if (args.as_json) {
    json j;
    j["estimator"] = res.estimator;
    if (!res.kernel.empty()) j["kernel"] = res.kernel;
    j["k"] = res.k;
    j["n"] = res.n;
    j["gamma1_hat"] = res.gamma1_hat;
    j["tail_convention"] = tt::estimators::to_string(conv);
    j["k_selection"] = auto_k ? "auto" : "fixed";
    std::cout << j.dump(2) << "\n";
  } else {
    std::ostringstream os;
    os.precision(10);
    os << "gamma1_hat = " << res.gamma1_hat << "  (estimator=" << res.estimator;
    if (!res.kernel.empty()) os << " kernel=" << res.kernel;
    os << " k=" << res.k << " n=" << res.n
       << " k_selection=" << (auto_k ? "auto" : "fixed") << ")";
    std::cout << os.str() << "\n";
  }
  return 0;
}

int run_simulate(const SimulateArgs& args) {
  tt::simulation::Config cfg =
      tt::simulation::parse_config_file(args.config_path);
  if (args.threads != 0) cfg.threads = args.threads;
  if (args.seed_given) cfg.master_seed = args.seed;

  const tt::simulation::Report report = tt::simulation::run_grid(cfg);
  const std::string csv = tt::simulation::report_csv(report);
  if (!args.output.empty()) {
    tt::simulation::write_report_csv(report, args.output);
  }
  std::cout << csv;
  return 0;
}

int run_asymptotics(const AsymptoticsArgs& args) {
  tt::asymptotics::AsymptoticParams params;
  params.gamma1 = args.gamma1;
  params.lambda = args.lambda;
  params.tau1 = args.tau1;
  if (args.p_given) {
    params.gamma2 = tt::model::gamma2_for_probability(args.gamma1, args.p);
  } else if (args.gamma2 != "inf") {
    std::size_t pos = 0;
    double g2 = 0.0;
    try {
      g2 = std::stod(args.gamma2, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != args.gamma2.size()) {
      throw std::invalid_argument(
          "--gamma2 must be a positive number or 'inf'");
    }
    params.gamma2 = g2;
  }
  params.validate();
  const tt::kernels::Kernel& kernel = kernel_or_throw(args.kernel);

  json j;
  j["gamma1"] = params.gamma1;
  if (params.gamma2.has_value()) {
    j["gamma2"] = *params.gamma2;
  } else {
    j["gamma2"] = nullptr;
  }
  j["lambda"] = params.lambda;
  j["tau1"] = params.tau1;
  j["kernel"] = kernel.name;

  const tt::asymptotics::LimitMoments moments =
      tt::asymptotics::limit_moments(params, kernel);
  j["mu"] = moments.mu;
  if (moments.sigma2.has_value()) {
    j["sigma2"] = *moments.sigma2;
    j["quadrature_error"] = moments.quadrature_error;
  } else {
    j["sigma2"] = nullptr;
    j["quadrature_error"] = nullptr;
    j["sigma2_note"] = moments.divergence_note;
  }

  tt::asymptotics::GammaProcessOptions mc_opts;
  mc_opts.paths = args.paths;
  mc_opts.grid_points = args.grid_points;
  mc_opts.grid_floor = args.grid_floor;
  mc_opts.seed = args.seed;
  mc_opts.threads = args.threads;
  try {
    const tt::asymptotics::GammaProcessEstimate mc =
        tt::asymptotics::gamma_process_variance(params, kernel, mc_opts);
    j["mc_sigma2"] = mc.variance;
    j["mc_stderr"] = mc.std_error;
    j["mc_paths"] = mc.paths;
  } catch (const std::invalid_argument& e) {
    j["mc_sigma2"] = nullptr;
    j["mc_stderr"] = nullptr;
    j["mc_note"] = e.what();
  }

  std::cout << j.dump(2) << "\n";
  return 0;
}

struct CheckPrinter {
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[ ok ] " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << "\n";
    if (!ok) ++failures;
  }
};

int run_selftest() {
  CheckPrinter out;
  std::ostringstream detail;

  // Kernel conformance.
  for (const std::string& name : tt::kernels::kernel_names()) {
    const tt::kernels::ConformanceReport rep =
        tt::kernels::conformance_check(*tt::kernels::find_kernel(name));
    std::string msg;
    for (const std::string& v : rep.violations) msg += v + "; ";
    out.check("kernel conformance: " + name, rep.passed, msg);
  }

  // Untruncated reduction: kernel estimator with the indicator kernel and
  // the unsmoothed estimator both collapse to the classical Hill value.
  {
    tt::rng::Engine eng = tt::rng::make_engine(7151);
    std::vector<double> xs;
    const tt::model::BurrSpec spec{0.8, 0.25};
    for (int i = 0; i < 80; ++i) {
      xs.push_back(tt::model::burr_quantile(spec, tt::rng::unit_open(eng)));
    }
    const tt::estimators::SortedView view(tt::model::complete_data_mode(xs));
    double worst = 0.0;
    for (std::size_t k = 2; k + 1 <= xs.size(); ++k) {
      const double a =
          tt::estimators::kernel_estimate(view, k,
                                          tt::kernels::indicator_kernel())
              .gamma1_hat;
      const double b = tt::estimators::bmn_estimate(view, k).gamma1_hat;
      const double c = tt::estimators::hill_estimate(view, k).gamma1_hat;
      worst = std::max({worst, std::abs(a - c), std::abs(b - c)});
    }
    detail.str("");
    detail << "max deviation " << worst;
    out.check("untruncated reduction to the classical estimator",
              worst <= 1e-12, detail.str());
  }

  // Truncated identity: indicator-kernel smoothing equals the unsmoothed
  // form on truncated data too.
  {
    tt::model::TruncationDesign design;
    design.target = tt::model::BurrSpec{0.6, 0.25};
    design.truncating = tt::model::BurrSpec{1.4, 0.25};
    design.latent_size = 150;
    const tt::model::ObservedSample sample =
        tt::model::sample_truncated(design, 99021);
    const tt::estimators::SortedView view(sample);
    double worst = 0.0;
    for (std::size_t k = 2; k + 1 <= view.size(); ++k) {
      const double a =
          tt::estimators::kernel_estimate(view, k,
                                          tt::kernels::indicator_kernel())
              .gamma1_hat;
      const double b = tt::estimators::bmn_estimate(view, k).gamma1_hat;
      worst = std::max(worst, std::abs(a - b));
    }
    detail.str("");
    detail << "max deviation " << worst;
    out.check("indicator smoothing equals the unsmoothed form",
              worst <= 1e-13, detail.str());
  }

  // Product-limit reference values on the two-point sample {(1,3),(2,4)}.
  {
    const tt::model::ObservedSample sample({{1.0, 3.0}, {2.0, 4.0}});
    const tt::estimators::SortedView view(sample);
    const bool ok = std::abs(view.fn_at(1) - std::exp(-0.5)) < 1e-15 &&
                    std::abs(view.fn_at(2) - 1.0) < 1e-15 &&
                    std::abs(view.fn_value(0.5) - std::exp(-1.5)) < 1e-15 &&
                    std::abs(tt::estimators::tail_mass(view, 1) - 0.5) <
                        1e-15;
    out.check("product-limit reference values", ok, "");
  }

  // Centering closed form: lambda = 1, tau1 = -1, indicator kernel.
  {
    tt::asymptotics::AsymptoticParams params;
    params.gamma1 = 0.6;
    params.lambda = 1.0;
    params.tau1 = -1.0;
    const tt::asymptotics::LimitMoments m = tt::asymptotics::limit_moments(
        params, tt::kernels::indicator_kernel());
    detail.str("");
    detail << "mu = " << m.mu;
    out.check("centering closed form (expect 0.5)",
              std::abs(m.mu - 0.5) < 1e-9, detail.str());
  }

  // Untruncated variance closed form: gamma1^2 * 10/7 for the biweight.
  {
    tt::asymptotics::AsymptoticParams params;
    params.gamma1 = 0.6;
    const tt::asymptotics::LimitMoments m = tt::asymptotics::limit_moments(
        params, tt::kernels::biweight_kernel());
    const double expect = 0.36 * 10.0 / 7.0;
    const bool ok = m.sigma2.has_value() &&
                    std::abs(*m.sigma2 - expect) < 1e-6 * expect;
    detail.str("");
    if (m.sigma2.has_value()) {
      detail << "sigma2 = " << *m.sigma2 << ", expected " << expect;
    } else {
      detail << "variance integral unexpectedly diverged";
    }
    out.check("untruncated variance closed form", ok, detail.str());
  }

  // Truncated variance: the quadrature route must report divergence, the
  // Monte Carlo route must produce a finite value.
  {
    tt::asymptotics::AsymptoticParams params;
    params.gamma1 = 0.6;
    params.gamma2 = 1.4;
    const tt::asymptotics::LimitMoments m = tt::asymptotics::limit_moments(
        params, tt::kernels::biweight_kernel());
    out.check("truncated variance integral reports divergence",
              !m.sigma2.has_value(), m.divergence_note);

    tt::asymptotics::GammaProcessOptions opts;
    opts.paths = 4000;
    opts.grid_points = 2000;
    const tt::asymptotics::GammaProcessEstimate mc =
        tt::asymptotics::gamma_process_variance(
            params, tt::kernels::biweight_kernel(), opts);
    detail.str("");
    detail << "mc sigma2 = " << mc.variance << " +- " << mc.std_error;
    out.check("truncated variance via the path functional",
              std::isfinite(mc.variance) && mc.variance > 0.0 &&
                  mc.variance < 10.0,
              detail.str());
  }

  std::cout << (out.failures == 0 ? "selftest: all checks passed"
                                  : "selftest: FAILURES present")
            << "\n";
  return out.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "trunctail: tail-index estimation under random right truncation"};
  app.require_subcommand(1);

  EstimateArgs est;
  CLI::App* est_cmd =
      app.add_subcommand("estimate", "Estimate gamma1 from a CSV sample");
  est_cmd->add_option("--input", est.input, "CSV file with header x,y")
      ->required();
  est_cmd->add_option("--estimator", est.estimator,
                      "kernel | bmn | gs | hill")
      ->check(CLI::IsMember({"kernel", "bmn", "gs", "hill"}));
  est_cmd->add_option("--kernel", est.kernel,
                      "indicator | biweight | triweight");
  est_cmd->add_option("--k", est.k,
                      "number of top order statistics (omit to select "
                      "automatically)");
  est_cmd->add_option("--k-max", est.k_max,
                      "upper bound for automatic selection (0 = fraction "
                      "rule)");
  est_cmd->add_option("--k-max-fraction", est.k_max_fraction,
                      "k_max = floor(fraction * n) when --k-max is 0");
  est_cmd->add_option("--k-min", est.k_min, "lower bound for selection");
  est_cmd->add_option("--theta", est.theta, "selection criterion exponent");
  est_cmd->add_option("--tail-convention", est.convention, "sum | product")
      ->check(CLI::IsMember({"sum", "product"}));
  est_cmd->add_flag("--json", est.as_json, "print a JSON object");
  est_cmd->add_option("--dn-dump", est.dn_dump,
                      "write the tail-process diagnostic to this CSV file");
  est_cmd->add_option("--dn-points", est.dn_points,
                      "grid size for --dn-dump");

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "Run a Monte Carlo grid from a config file");
  sim_cmd->add_option("--config", sim.config_path, "config file")->required();
  sim_cmd->add_option("--output", sim.output, "write the report CSV here");
  sim_cmd->add_option("--threads", sim.threads,
                      "worker threads (0 = config/env/hardware)");
  CLI::Option* seed_opt =
      sim_cmd->add_option("--seed", sim.seed, "override the master seed");

  AsymptoticsArgs asy;
  CLI::App* asy_cmd = app.add_subcommand(
      "asymptotics", "Limiting centering and variance for the kernel "
                     "estimator");
  asy_cmd->add_option("--gamma1", asy.gamma1, "target tail index")
      ->required();
  asy_cmd->add_option("--gamma2", asy.gamma2,
                      "truncating tail index, or 'inf' for the untruncated "
                      "limit");
  CLI::Option* p_opt = asy_cmd->add_option(
      "--p", asy.p, "truncation probability (alternative to --gamma2)");
  asy_cmd->add_option("--lambda", asy.lambda, "second-order scale");
  asy_cmd->add_option("--tau1", asy.tau1, "second-order exponent (< 0)");
  asy_cmd->add_option("--kernel", asy.kernel,
                      "indicator | biweight | triweight");
  asy_cmd->add_option("--paths", asy.paths, "Monte Carlo paths");
  asy_cmd->add_option("--grid-points", asy.grid_points,
                      "path grid resolution");
  asy_cmd->add_option("--grid-floor", asy.grid_floor,
                      "smallest grid time (in (0, 0.5))");
  asy_cmd->add_option("--seed", asy.seed, "Monte Carlo seed");
  asy_cmd->add_option("--threads", asy.threads,
                      "worker threads (0 = hardware)");

  CLI::App* self_cmd =
      app.add_subcommand("selftest", "Run built-in consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  sim.seed_given = seed_opt->count() > 0;
  asy.p_given = p_opt->count() > 0;
  if (asy.p_given && asy.gamma2 != "inf") {
    std::cerr << "error: pass either --gamma2 or --p, not both\n";
    return 2;
  }

  try {
    if (*est_cmd) return run_estimate(est);
    if (*sim_cmd) return run_simulate(sim);
    if (*asy_cmd) return run_asymptotics(asy);
    if (*self_cmd) return run_selftest();
  } catch (const tt::EstimationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const tt::EmptySampleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
