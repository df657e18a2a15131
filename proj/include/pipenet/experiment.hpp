#ifndef PIPENET_EXPERIMENT_HPP
#define PIPENET_EXPERIMENT_HPP

/**
 * @file experiment.hpp
 * @brief Synthetic benchmark of the three refinement strategies on random
 *        error distributions over a 12-pipe network.
 *
 * Every pipe starts at the algebraic model with model errors drawn from
 * U[0,1] and latent discretisation errors from U[0,0.2]. Each strategy
 * variant plans a refinement scheme per sample; the mean total cost and the
 * savings against strategy 1 reproduce the published comparison up to the
 * random stream.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "pipenet/cost_model.hpp"
#include "pipenet/strategies.hpp"

namespace pipenet {

/// Deterministic 64-bit stream (splitmix64); independent substreams per sample.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1).
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  /// Uniform in [a, b).
  double next_real(double a, double b) { return a + (b - a) * next_u01(); }
  /// Uniform integer in [lo, hi].
  int next_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  /// Independent substream for one sample index.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    Rng mix(seed);
    (void)mix.next_u64();
    Rng out(mix.next_u64() ^ (0xD1B54A32D192ED03ull * (index + 1)));
    (void)out.next_u64();
    return out;
  }

 private:
  std::uint64_t state_;
};

struct ExperimentConfig {
  int n_pipes = 12;
  int samples = 10000;
  std::uint64_t seed = 1337;
  int node_min = 100;
  int node_max = 200;
  double model_error_max = 1.0;   ///< e_m ~ U[0, model_error_max]
  double discr_error_max = 0.2;   ///< e_x, e_t ~ U[0, discr_error_max]
  double tol = 0.1;
  double target_value = -1.0;     ///< |M(u^h)|; < 0 means the default 2.5 * n_pipes
  double kappa = 1.0 / 3.0;
  std::vector<double> phis = {0.8, 0.9, 1.0};
  double safety_factor = 1.1;
  double fm_32 = 0.75;
  double fm_21 = 0.25;
  double s_x = 2.0;
  double s_t = 1.0;
  bool run_s1 = true;
  bool run_s2 = true;
  bool run_s3 = true;
  int threads = 1;

  double resolved_target() const { return target_value > 0.0 ? target_value : 2.5 * n_pipes; }
  StrategyConfig strategy_config(double phi) const;
  void validate() const;
};

struct VariantResult {
  std::string strategy;  ///< "s1", "s2" or "s3"
  double phi = 0.0;      ///< 0 for s1
  double mean_cost = 0.0;
  double savings_pct = 0.0;  ///< vs strategy 1; 0 when s1 is absent or for s1 itself
  std::vector<double> sample_costs;
};

struct ExperimentResult {
  std::vector<VariantResult> variants;
};

/// One random network sample: n_pipes fresh pipes at the algebraic model.
std::vector<PipeRefinementState> sample_instance(const ExperimentConfig& cfg, Rng& rng);

/// Runs every enabled strategy variant over all samples. Each returned
/// scheme is verified against the tolerance before its cost is recorded.
/// Throws Unsatisfiable with the sample index if a strategy cannot meet
/// the tolerance on some sample.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const CostParams& params = {});

/// Summary CSV: header strategy,phi,mean_cost,savings_pct; one row per variant.
void export_results(const ExperimentResult& result, const std::string& path);

/// Long-format per-sample CSV: sample,strategy,phi,cost.
void export_samples(const ExperimentResult& result, const std::string& path);

/// Parses a summary CSV written by export_results (round-trip checks).
ExperimentResult parse_results_csv(const std::string& path);

}  // namespace pipenet

#endif  // PIPENET_EXPERIMENT_HPP
