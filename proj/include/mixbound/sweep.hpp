#pragma once
// End-to-end experiment: for each size and seed, draw a landscape, build the
// Metropolis chain, certify spectral and path-based bounds, optionally bracket
// the uniform-start mixing time exactly, and emit deterministic CSV/JSON.
//
// Exit-code contract: hard failures are violations of certified inequalities
// (exit 1); soft failures are statistical or asymptotic expectations that a
// finite desk-scale run may miss (exit 2); otherwise 0.

#include <cstdint>
#include <string>
#include <vector>

#include "mixbound/hypercube.hpp"

namespace mixbound {

struct ExperimentConfig {
  std::vector<int> N_list;
  double beta = 0.0;          // resolved absolute inverse temperature
  int num_seeds = 0;
  std::uint64_t base_seed = 1;
  double epsilon = 0.25;      // level for the exact bracket
  double c_e = 1.0;           // path-classification threshold constant
  double c = 0.1;             // occupation/static slack constant
  double c1 = 1.0;
  ThresholdVariant variant = ThresholdVariant::proposition;
  double rho = 0.75;
  // Negative means "derive per size": zeta^2 = 12 (beta_c/beta)
  // sqrt(c1 (1+c) log N / N), d = beta (1 + zeta),
  // p/(1-p) = (2/3) (beta^2/(beta_c^2+beta^2)) zeta^2, p' = p.
  double zeta_override = -1.0;
  double d_override = -1.0;
  double p_override = -1.0;
  double p_prime_override = -1.0;
  bool certify_paths = true;
  int exact_max_N = 10;       // exact bracket skipped above this size
  std::string output_prefix;  // empty: caller decides what to do with the text
  std::uint64_t source_digest = 0;  // digest of the raw config text
};

// Strict parse: unknown keys are rejected.  Exactly one of "beta" and
// "beta_over_beta_c" must be present.
ExperimentConfig config_from_json(const std::string& text);

struct SweepRecord {
  int N = 0;
  int seed_index = 0;
  std::uint64_t instance_seed = 0;
  std::uint64_t instance_digest = 0;

  double beta = 0.0;
  double epsilon = 0.0;
  double p = 0.0;
  double p_prime = 0.0;
  double zeta = 0.0;
  double d = 0.0;
  double rho = 0.0;

  double gap = 0.0;
  double rate = 0.0;  // -(1/N) log gap

  double path_inv_gap = 0.0;        // certified upper bound on 1/gap
  double log_path_inv_L_eta = 0.0;  // log of the bound on 1/L_eta(p')
  double log_path_inv_L = 0.0;      // log of the bound on 1/L_pi(p)
  double log_T_theory = 0.0;        // log mixing-time bound at epsilon
  double T_theory = 0.0;            // exp of the above (may be +inf)

  bool exact_computed = false;
  double t_eta_lower = 0.0;  // NaN when not computed
  double t_eta_upper = 0.0;

  bool certificate_computed = false;
  double good_fraction = 0.0;
  long long long_fallbacks = 0;
  long long short_fallbacks = 0;
  int max_path_length = 0;

  bool statics_computed = false;
  bool statics_holds = false;
  double R = 0.0;
  bool R_ok = false;
  bool z_lower_holds = false;
  bool z_low_upper_holds = false;
  bool empty_low_set = true;
  bool zeta_in_range = false;
  bool p_below_half = false;
};

struct SweepOutcome {
  std::vector<SweepRecord> records;
  std::vector<std::string> hard_failures;
  std::vector<std::string> soft_failures;
  std::string csv_text;
  std::string json_text;

  int exit_code() const {
    if (!hard_failures.empty()) return 1;
    return soft_failures.empty() ? 0 : 2;
  }
};

SweepOutcome run_sweep(const ExperimentConfig& config);

// Empirical (1 - exp(-c N))-quantile of the certified exact upper times,
// grouped by size.  Every group must contain at least 30 finite records
// (InsufficientSeeds otherwise).
struct TnEstimate {
  int N = 0;
  double quantile_level = 0.0;
  double value = 0.0;
  int num_records = 0;
  double epsilon = 0.0;
  double c = 0.0;
};

std::vector<TnEstimate> t_n_estimator(const std::vector<SweepRecord>& records,
                                      double epsilon, double c);

}  // namespace mixbound
