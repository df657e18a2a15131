#include "pipenet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "pipenet/csv.hpp"
#include "pipenet/errors.hpp"

namespace pipenet {

StrategyConfig ExperimentConfig::strategy_config(double phi) const {
  StrategyConfig sc;
  sc.tol = tol;
  sc.kappa = kappa;
  sc.phi = phi;
  sc.safety_factor = safety_factor;
  sc.s_x = s_x;
  sc.s_t = s_t;
  sc.target_value = resolved_target();
  sc.fm_32 = fm_32;
  sc.fm_21 = fm_21;
  return sc;
}

void ExperimentConfig::validate() const {
  if (n_pipes < 1) throw ConfigError("experiment: n_pipes must be >= 1");
  if (samples < 1) throw ConfigError("experiment: samples must be >= 1");
  if (node_min < 1 || node_max < node_min) throw ConfigError("experiment: invalid node range");
  if (model_error_max < 0.0 || discr_error_max < 0.0)
    throw ConfigError("experiment: error ranges must be nonnegative");
  if (threads < 1) throw ConfigError("experiment: threads must be >= 1");
  for (double phi : phis)
    if (!(phi > 0.0 && phi <= 1.0)) throw ConfigError("experiment: phi must be in (0,1]");
  strategy_config(1.0).validate();
}

std::vector<PipeRefinementState> sample_instance(const ExperimentConfig& cfg, Rng& rng) {
  std::vector<PipeRefinementState> states(static_cast<size_t>(cfg.n_pipes));
  for (int j = 0; j < cfg.n_pipes; ++j) {
    auto& s = states[static_cast<size_t>(j)];
    s.id = j;
    s.level = ModelLevel::m3;
    s.n_x = rng.next_int(cfg.node_min, cfg.node_max);
    s.n_t = rng.next_int(cfg.node_min, cfg.node_max);
    // Sampled discretisation errors of an algebraic-model pipe are latent:
    // they enter the planning arithmetic only after a model switch.
    s.errors.model = rng.next_real(0.0, cfg.model_error_max);
    s.errors.space = rng.next_real(0.0, cfg.discr_error_max);
    s.errors.time = rng.next_real(0.0, cfg.discr_error_max);
  }
  return states;
}

namespace {

struct Variant {
  std::string strategy;
  double phi;
};

std::vector<Variant> enabled_variants(const ExperimentConfig& cfg) {
  std::vector<Variant> v;
  if (cfg.run_s1) v.push_back({"s1", 0.0});
  if (cfg.run_s2)
    for (double phi : cfg.phis) v.push_back({"s2", phi});
  if (cfg.run_s3)
    for (double phi : cfg.phis) v.push_back({"s3", phi});
  if (v.empty()) throw ConfigError("experiment: no strategy variants enabled");
  return v;
}

double run_variant_on_sample(const Variant& var, const std::vector<PipeRefinementState>& states,
                             const ExperimentConfig& cfg, const CostParams& params) {
  const StrategyConfig sc = cfg.strategy_config(var.phi > 0.0 ? var.phi : 1.0);
  RefinementScheme scheme;
  if (var.strategy == "s1")
    scheme = individual_bounds(states, sc);
  else if (var.strategy == "s2")
    scheme = maximal_error_refinement(states, sc);
  else
    scheme = maximal_error_to_cost_refinement(states, sc, params);
  const double err = network_error(states, scheme, sc);
  if (err > sc.tol)
    throw Error("experiment: scheme violates tolerance (" + format_g6(err) + " > " +
                format_g6(sc.tol) + ")");
  return scheme_cost(states, scheme, params);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const CostParams& params) {
  cfg.validate();
  params.validate();
  const std::vector<Variant> variants = enabled_variants(cfg);
  const size_t n_var = variants.size();
  const size_t n_samp = static_cast<size_t>(cfg.samples);

  // sample-major storage keeps the reduction order fixed regardless of threads
  std::vector<double> costs(n_samp * n_var, 0.0);

  std::atomic<long> fail_sample{-1};
  std::exception_ptr fail_error;
  std::mutex fail_mutex;

  auto worker = [&](size_t begin, size_t end) {
    for (size_t k = begin; k < end; ++k) {
      if (fail_sample.load(std::memory_order_relaxed) >= 0) return;
      Rng rng = Rng::substream(cfg.seed, k);
      const auto states = sample_instance(cfg, rng);
      try {
        for (size_t v = 0; v < n_var; ++v)
          costs[k * n_var + v] = run_variant_on_sample(variants[v], states, cfg, params);
      } catch (...) {
        std::lock_guard<std::mutex> lock(fail_mutex);
        const long mine = static_cast<long>(k);
        const long cur = fail_sample.load();
        if (cur < 0 || mine < cur) {
          fail_sample.store(mine);
          fail_error = std::current_exception();
        }
        return;
      }
    }
  };

  const int n_threads = std::min<int>(cfg.threads, cfg.samples);
  if (n_threads <= 1) {
    worker(0, n_samp);
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (n_samp + static_cast<size_t>(n_threads) - 1) / static_cast<size_t>(n_threads);
    for (int t = 0; t < n_threads; ++t) {
      const size_t b = static_cast<size_t>(t) * chunk;
      const size_t e = std::min(n_samp, b + chunk);
      if (b < e) pool.emplace_back(worker, b, e);
    }
    for (auto& th : pool) th.join();
  }
  if (fail_sample.load() >= 0) {
    try {
      std::rethrow_exception(fail_error);
    } catch (const Unsatisfiable& u) {
      throw Unsatisfiable("sample " + std::to_string(fail_sample.load()) + ": " + u.what());
    }
  }

  ExperimentResult result;
  result.variants.resize(n_var);
  for (size_t v = 0; v < n_var; ++v) {
    auto& out = result.variants[v];
    out.strategy = variants[v].strategy;
    out.phi = variants[v].phi;
    out.sample_costs.resize(n_samp);
    double sum = 0.0;
    for (size_t k = 0; k < n_samp; ++k) {
      out.sample_costs[k] = costs[k * n_var + v];
      sum += out.sample_costs[k];
    }
    out.mean_cost = sum / static_cast<double>(n_samp);
  }
  const auto s1 = std::find_if(result.variants.begin(), result.variants.end(),
                               [](const VariantResult& v) { return v.strategy == "s1"; });
  for (auto& v : result.variants) {
    v.savings_pct = (s1 != result.variants.end() && &v != &*s1)
                        ? 100.0 * (1.0 - v.mean_cost / s1->mean_cost)
                        : 0.0;
  }
  return result;
}

void export_results(const ExperimentResult& result, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "strategy,phi,mean_cost,savings_pct\n";
  for (const auto& v : result.variants) {
    out << v.strategy << ',';
    if (v.phi > 0.0) out << format_g6(v.phi);
    out << ',' << format_g6(v.mean_cost) << ',' << format_g6(v.savings_pct) << '\n';
  }
  if (!out) throw Error("failed writing results to " + path);
}

void export_samples(const ExperimentResult& result, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "sample,strategy,phi,cost\n";
  for (size_t k = 0; !result.variants.empty() && k < result.variants.front().sample_costs.size(); ++k) {
    for (const auto& v : result.variants) {
      out << k << ',' << v.strategy << ',';
      if (v.phi > 0.0) out << format_g6(v.phi);
      out << ',' << format_g6(v.sample_costs[k]) << '\n';
    }
  }
  if (!out) throw Error("failed writing samples to " + path);
}

ExperimentResult parse_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open results file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "strategy,phi,mean_cost,savings_pct")
    throw Error("results file has unexpected header: " + path);
  ExperimentResult result;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string strategy, phi, mean, savings;
    if (!std::getline(ss, strategy, ',') || !std::getline(ss, phi, ',') ||
        !std::getline(ss, mean, ',') || !std::getline(ss, savings, ','))
      throw Error("malformed results row: " + line);
    VariantResult v;
    v.strategy = strategy;
    v.phi = phi.empty() ? 0.0 : std::stod(phi);
    v.mean_cost = std::stod(mean);
    v.savings_pct = std::stod(savings);
    result.variants.push_back(std::move(v));
  }
  return result;
}

}  // namespace pipenet
