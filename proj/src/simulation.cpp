#include "trunctail/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include "trunctail/errors.hpp"
#include "trunctail/kernels.hpp"
#include "trunctail/model.hpp"
#include "trunctail/numeric.hpp"
#include "trunctail/random.hpp"
#include "trunctail/threshold.hpp"

namespace trunctail::simulation {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxResampleAttempts = 128;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    const std::string item = trim(cur);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& v, const std::string& key) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key +
                                "' has a non-numeric value '" + v + "'");
  }
  if (pos != v.size()) {
    throw std::invalid_argument("config: key '" + key +
                                "' has trailing junk in value '" + v + "'");
  }
  return d;
}

std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  std::size_t pos = 0;
  unsigned long long u = 0;
  try {
    u = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key +
                                "' has a non-integer value '" + v + "'");
  }
  if (pos != v.size()) {
    throw std::invalid_argument("config: key '" + key +
                                "' has trailing junk in value '" + v + "'");
  }
  return static_cast<std::uint64_t>(u);
}

// One output row template within a cell: which estimator, and (for the
// kernel estimator) which kernel.
struct Slot {
  std::string estimator;
  std::string kernel_name;  // empty for kernel-free estimators
  const kernels::Kernel* kernel = nullptr;
};

std::vector<Slot> build_slots(const Config& cfg) {
  std::vector<Slot> slots;
  for (const std::string& est : cfg.estimators) {
    if (est == "kernel") {
      for (const std::string& kn : cfg.kernels) {
        const kernels::Kernel* k = kernels::find_kernel(kn);
        slots.push_back(Slot{est, kn, k});
      }
    } else {
      slots.push_back(Slot{est, "", nullptr});
    }
  }
  return slots;
}

}  // namespace

void Config::validate() const {
  if (!(gamma1 > 0.0) || !std::isfinite(gamma1)) {
    throw std::invalid_argument("config: gamma1 must be positive finite");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("config: delta must be positive finite");
  }
  if (p_values.empty()) {
    throw std::invalid_argument("config: p_values must not be empty");
  }
  for (double p : p_values) {
    // p <= 0.5 (truncating tail at or below the target tail) is allowed:
    // estimation is still defined, only harder.
    if (!(p > 0.0) || !(p < 1.0)) {
      throw std::invalid_argument("config: every p must lie in (0, 1)");
    }
  }
  if (latent_sizes.empty()) {
    throw std::invalid_argument("config: latent_sizes must not be empty");
  }
  for (std::size_t n : latent_sizes) {
    if (n < 8) {
      throw std::invalid_argument("config: latent sizes must be at least 8");
    }
  }
  if (replicates < 1) {
    throw std::invalid_argument("config: replicates must be at least 1");
  }
  if (estimators.empty()) {
    throw std::invalid_argument("config: estimators must not be empty");
  }
  bool wants_kernels = false;
  for (const std::string& e : estimators) {
    if (e == "kernel") {
      wants_kernels = true;
    } else if (e != "bmn" && e != "gs" && e != "hill") {
      throw std::invalid_argument("config: unknown estimator '" + e + "'");
    }
  }
  if (wants_kernels) {
    if (kernels.empty()) {
      throw std::invalid_argument(
          "config: the kernel estimator needs at least one kernel");
    }
    for (const std::string& kn : kernels) {
      if (kernels::find_kernel(kn) == nullptr) {
        throw std::invalid_argument("config: unknown kernel '" + kn + "'");
      }
    }
  }
  if (!(rt_theta >= 0.0) || !std::isfinite(rt_theta)) {
    throw std::invalid_argument("config: rt_theta must be >= 0");
  }
  if (rt_k_min < 2) {
    throw std::invalid_argument("config: rt_k_min must be at least 2");
  }
  if (!(rt_k_max_fraction > 0.0) || !(rt_k_max_fraction <= 1.0)) {
    throw std::invalid_argument(
        "config: rt_k_max_fraction must lie in (0, 1]");
  }
}

Config parse_config(std::istream& in) {
  Config cfg;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not of the form key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " has an empty key or value");
    }
    if (!seen.insert(key).second) {
      throw std::invalid_argument("config: duplicate key '" + key +
                                  "' at line " + std::to_string(line_no));
    }

    if (key == "gamma1") {
      cfg.gamma1 = parse_double(value, key);
    } else if (key == "delta") {
      cfg.delta = parse_double(value, key);
    } else if (key == "p_values") {
      cfg.p_values.clear();
      for (const std::string& item : split_list(value)) {
        cfg.p_values.push_back(parse_double(item, key));
      }
    } else if (key == "latent_sizes") {
      cfg.latent_sizes.clear();
      for (const std::string& item : split_list(value)) {
        cfg.latent_sizes.push_back(
            static_cast<std::size_t>(parse_u64(item, key)));
      }
    } else if (key == "replicates") {
      cfg.replicates = static_cast<std::size_t>(parse_u64(value, key));
    } else if (key == "kernels") {
      cfg.kernels = split_list(value);
    } else if (key == "estimators") {
      cfg.estimators = split_list(value);
    } else if (key == "master_seed") {
      cfg.master_seed = parse_u64(value, key);
    } else if (key == "rt_theta") {
      cfg.rt_theta = parse_double(value, key);
    } else if (key == "rt_k_min") {
      cfg.rt_k_min = static_cast<std::size_t>(parse_u64(value, key));
    } else if (key == "rt_k_max_fraction") {
      cfg.rt_k_max_fraction = parse_double(value, key);
    } else if (key == "tail_convention") {
      if (value == "sum") {
        cfg.convention = estimators::TailConvention::partial_sum;
      } else if (value == "product") {
        cfg.convention = estimators::TailConvention::product;
      } else {
        throw std::invalid_argument(
            "config: tail_convention must be 'sum' or 'product'");
      }
    } else if (key == "threads") {
      cfg.threads = static_cast<std::size_t>(parse_u64(value, key));
    } else {
      throw std::invalid_argument("config: unknown key '" + key +
                                  "' at line " + std::to_string(line_no));
    }
  }
  cfg.validate();
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open '" + path + "'");
  }
  return parse_config(in);
}

std::string serialize_config(const Config& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "gamma1 = " << cfg.gamma1 << "\n";
  os << "delta = " << cfg.delta << "\n";
  os << "p_values = ";
  for (std::size_t i = 0; i < cfg.p_values.size(); ++i) {
    if (i) os << ", ";
    os << cfg.p_values[i];
  }
  os << "\n";
  os << "latent_sizes = ";
  for (std::size_t i = 0; i < cfg.latent_sizes.size(); ++i) {
    if (i) os << ", ";
    os << cfg.latent_sizes[i];
  }
  os << "\n";
  os << "replicates = " << cfg.replicates << "\n";
  os << "kernels = ";
  for (std::size_t i = 0; i < cfg.kernels.size(); ++i) {
    if (i) os << ", ";
    os << cfg.kernels[i];
  }
  os << "\n";
  os << "estimators = ";
  for (std::size_t i = 0; i < cfg.estimators.size(); ++i) {
    if (i) os << ", ";
    os << cfg.estimators[i];
  }
  os << "\n";
  os << "master_seed = " << cfg.master_seed << "\n";
  os << "rt_theta = " << cfg.rt_theta << "\n";
  os << "rt_k_min = " << cfg.rt_k_min << "\n";
  os << "rt_k_max_fraction = " << cfg.rt_k_max_fraction << "\n";
  os << "tail_convention = " << estimators::to_string(cfg.convention)
     << "\n";
  os << "threads = " << cfg.threads << "\n";
  return os.str();
}

std::size_t resolve_threads(std::size_t configured) {
  if (configured != 0) return configured;
  if (const char* env = std::getenv("TRUNCTAIL_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 4096) {
      return static_cast<std::size_t>(v);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<std::size_t>(hw);
}

Report run_grid(const Config& cfg) {
  cfg.validate();
  const std::vector<Slot> slots = build_slots(cfg);
  const std::size_t n_slots = slots.size();
  const std::size_t reps = cfg.replicates;
  const std::size_t workers =
      std::min(resolve_threads(cfg.threads), std::max<std::size_t>(reps, 1));

  Report report;
  report.config = cfg;

  std::size_t cell_id = 0;
  for (std::size_t ni = 0; ni < cfg.latent_sizes.size(); ++ni) {
    for (std::size_t pi = 0; pi < cfg.p_values.size(); ++pi, ++cell_id) {
      const std::size_t latent = cfg.latent_sizes[ni];
      const double p = cfg.p_values[pi];

      model::TruncationDesign design;
      design.target = model::BurrSpec{cfg.gamma1, cfg.delta};
      design.truncating = model::BurrSpec{
          model::gamma2_for_probability(cfg.gamma1, p), cfg.delta};
      design.latent_size = latent;

      // Per-replicate result slots; NaN marks a failed estimate.
      std::vector<std::vector<double>> values(
          n_slots, std::vector<double>(reps, kNaN));
      std::vector<double> obs_n(reps, 0.0);
      std::vector<std::size_t> resamples(reps, 0);

      auto run_replicate = [&](std::size_t r) {
        // Draw the sample, resampling (with the attempt folded into the
        // seed) when every latent pair is truncated.
        std::optional<model::ObservedSample> sample;
        std::size_t attempt = 0;
        while (!sample.has_value()) {
          try {
            sample.emplace(model::sample_truncated(
                design,
                rng::derive_seed(cfg.master_seed, cell_id, r, attempt)));
          } catch (const EmptySampleError&) {
            ++attempt;
            if (attempt >= kMaxResampleAttempts) break;
          }
        }
        resamples[r] = attempt;
        if (!sample.has_value()) return;  // all slots stay failed
        const std::size_t n = sample->size();
        obs_n[r] = static_cast<double>(n);

        const std::size_t k_cap = static_cast<std::size_t>(
            std::floor(cfg.rt_k_max_fraction * static_cast<double>(n)));
        const std::size_t k_max = std::min(n - 1, k_cap);
        if (k_max < cfg.rt_k_min + 1) return;  // sample too small: fail all

        threshold::Config tcfg;
        tcfg.theta = cfg.rt_theta;
        tcfg.k_min = cfg.rt_k_min;
        tcfg.k_max = k_max;

        const estimators::SortedView view(*sample);
        for (std::size_t si = 0; si < n_slots; ++si) {
          try {
            std::vector<double> traj;
            if (slots[si].estimator == "kernel") {
              traj = estimators::kernel_trajectory(
                  view, *slots[si].kernel, k_max, cfg.convention);
            } else if (slots[si].estimator == "bmn") {
              traj = estimators::bmn_trajectory(view, k_max);
            } else if (slots[si].estimator == "gs") {
              traj = estimators::gs_trajectory(view, k_max);
            } else {
              traj = estimators::hill_trajectory(view, k_max);
            }
            const threshold::Selection sel = threshold::select_k(traj, tcfg);
            const double v = traj[sel.k];
            if (std::isfinite(v)) values[si][r] = v;
          } catch (const EstimationError&) {
            // leave NaN: counted as a failure
          }
        }
      };

      if (workers <= 1) {
        for (std::size_t r = 0; r < reps; ++r) run_replicate(r);
      } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t wi = 0; wi < workers; ++wi) {
          pool.emplace_back([&]() {
            while (true) {
              const std::size_t r = next.fetch_add(1);
              if (r >= reps) return;
              run_replicate(r);
            }
          });
        }
        for (std::thread& th : pool) th.join();
      }

      // Ordered reductions (replicate order, compensated sums): identical
      // output for every worker count.
      numeric::KahanSum n_sum;
      std::size_t n_count = 0;
      std::size_t empty_total = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        if (obs_n[r] > 0.0) {
          n_sum.add(obs_n[r]);
          ++n_count;
        }
        empty_total += resamples[r];
      }
      const double mean_n =
          n_count ? n_sum.value() / static_cast<double>(n_count) : 0.0;

      for (std::size_t si = 0; si < n_slots; ++si) {
        CellRow row;
        row.latent_size = latent;
        row.mean_n = mean_n;
        row.p = p;
        row.gamma1 = cfg.gamma1;
        row.kernel = slots[si].kernel_name.empty() ? "-"
                                                   : slots[si].kernel_name;
        row.estimator = slots[si].estimator;
        row.empty_resamples = empty_total;

        numeric::KahanSum dev;
        numeric::KahanSum dev_sq;
        std::size_t used = 0;
        for (std::size_t r = 0; r < reps; ++r) {
          const double v = values[si][r];
          if (!std::isfinite(v)) continue;
          const double d = v - cfg.gamma1;
          dev.add(d);
          dev_sq.add(d * d);
          ++used;
        }
        row.used = used;
        row.failures = reps - used;
        if (used > 0) {
          row.abs_bias = std::abs(dev.value() / static_cast<double>(used));
          row.rmse =
              std::sqrt(dev_sq.value() / static_cast<double>(used));
        } else {
          row.abs_bias = kNaN;
          row.rmse = kNaN;
        }
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

std::string report_csv(const Report& report) {
  std::string out = "N,mean_n,p,gamma1,kernel,estimator,abs_bias,rmse,failures\n";
  char buf[256];
  for (const CellRow& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%.2f,%.6g,%.6g,%s,%s,%.6f,%.6f,%zu\n",
                  row.latent_size, row.mean_n, row.p, row.gamma1,
                  row.kernel.c_str(), row.estimator.c_str(), row.abs_bias,
                  row.rmse, row.failures);
    out += buf;
  }
  return out;
}

void write_report_csv(const Report& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("cannot open output file '" + path + "'");
  }
  out << report_csv(report);
  if (!out) {
    throw std::runtime_error("failed while writing '" + path + "'");
  }
}

}  // namespace trunctail::simulation
