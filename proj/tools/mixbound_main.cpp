// Command-line driver: sweep | bounds | rem | env | paths.
// Result documents go to stdout (or --out); diagnostics go to stderr.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixbound/constants.hpp"
#include "mixbound/environment.hpp"
#include "mixbound/errors.hpp"
#include "mixbound/hypercube.hpp"
#include "mixbound/json_io.hpp"
#include "mixbound/path_bounds.hpp"
#include "mixbound/rem.hpp"
#include "mixbound/semigroup.hpp"
#include "mixbound/spectral.hpp"
#include "mixbound/sweep.hpp"
#include "mixbound/util.hpp"

namespace {

using nlohmann::json;
using namespace mixbound;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

json statics_to_json(const StaticBoundsReport& s) {
  json obj;
  obj["beta"] = s.beta;
  obj["beta_c"] = s.beta_c;
  obj["d"] = s.d;
  obj["zeta"] = s.zeta;
  obj["rho"] = s.rho;
  obj["p"] = s.p;
  obj["log_z"] = s.log_z;
  obj["log_z_lower_ref"] = s.log_z_lower_ref;
  obj["z_lower_holds"] = s.z_lower_holds;
  obj["log_z_low"] = s.log_z_low;
  obj["log_z_low_upper_ref"] = s.log_z_low_upper_ref;
  obj["z_low_upper_holds"] = s.z_low_upper_holds;
  obj["empty_low_set"] = s.empty_low_set;
  obj["zeta_in_range"] = s.zeta_in_range;
  obj["zeta_sq_floor"] = s.zeta_sq_floor;
  obj["zeta_meets_floor"] = s.zeta_meets_floor;
  obj["statics_lhs"] = s.statics_lhs;
  obj["statics_rhs"] = s.statics_rhs;
  obj["statics_holds"] = s.statics_holds;
  obj["R"] = s.R;
  obj["R_ok"] = s.R_ok;
  json checks = json::array();
  for (const SubcubeCheck& c : s.subcube_checks) {
    json row;
    row["alpha"] = c.alpha;
    row["free_coords"] = c.free_coords;
    row["applicable"] = c.applicable;
    row["A"] = c.A;
    row["regime"] = c.regime;
    row["log_sup"] = c.log_sup;
    row["log_bound"] = c.log_bound;
    row["holds"] = c.holds;
    checks.push_back(row);
  }
  obj["subcube_checks"] = checks;
  return obj;
}

json occupation_to_json(const OccupationProfile& profile) {
  json obj;
  obj["N"] = profile.N;
  obj["d"] = profile.d;
  obj["c"] = profile.c;
  obj["c1"] = profile.c1;
  obj["M_scale"] = profile.M_scale;
  obj["D_index"] = profile.D_index;
  obj["overflow_count"] = profile.overflow_count;
  obj["total_states"] = profile.total_states;
  obj["sum_rule_ok"] = profile.sum_rule_ok;
  json intervals = json::array();
  for (const OccupationInterval& iv : profile.intervals) {
    json row;
    row["lower"] = iv.lower;
    row["upper"] = iv.upper;
    row["count"] = iv.count;
    row["p"] = iv.p;
    row["p_lower"] = iv.p_lower;
    row["p_upper"] = iv.p_upper;
    row["rho"] = iv.rho;
    row["lambda_rate"] = iv.lambda_rate;
    row["exceeds"] = iv.exceeds;
    row["truncated"] = iv.truncated;
    intervals.push_back(row);
  }
  obj["intervals"] = intervals;
  return obj;
}

json certificate_to_json(const PathCertificate& cert) {
  json obj;
  obj["all_interior_good_fraction"] = cert.all_interior_good_fraction;
  obj["max_length"] = cert.max_length;
  obj["total_pairs"] = cert.total_pairs;
  obj["long_pairs"] = cert.long_pairs;
  obj["short_pairs"] = cert.short_pairs;
  obj["long_fallbacks"] = cert.long_fallbacks;
  obj["short_fallbacks"] = cert.short_fallbacks;
  obj["composite_pairs"] = cert.composite_pairs;
  obj["length_violations"] = cert.length_violations;
  return obj;
}

struct DerivedRemParams {
  double zeta, d, p;
};

DerivedRemParams derive_rem_params(int N, double beta, double c, double c1,
                                   double zeta_opt, double d_opt,
                                   double p_opt) {
  DerivedRemParams out{};
  const double logN = std::log(static_cast<double>(N));
  out.zeta = zeta_opt >= 0.0
                 ? zeta_opt
                 : std::sqrt(12.0 * (critical_beta / beta) *
                             std::sqrt(c1 * (1.0 + c) * logN / N));
  out.d = d_opt >= 0.0 ? d_opt : beta * (1.0 + out.zeta);
  if (p_opt > 0.0) {
    out.p = p_opt;
  } else {
    const double r =
        (2.0 / 3.0) *
        (beta * beta / (critical_beta * critical_beta + beta * beta)) *
        out.zeta * out.zeta;
    out.p = r / (1.0 + r);
  }
  return out;
}

// ---------------------------------------------------------------------------

int run_sweep_command(const std::string& config_path,
                      const std::string& out_override) {
  const std::string text = read_text_file(config_path);
  const ExperimentConfig config = config_from_json(text);
  const SweepOutcome outcome = run_sweep(config);
  const std::string prefix =
      out_override.empty() ? config.output_prefix : out_override;
  if (prefix.empty()) {
    std::cout << outcome.json_text;
  } else {
    write_text_file(prefix + ".json", outcome.json_text);
    write_text_file(prefix + ".csv", outcome.csv_text);
  }
  for (const std::string& msg : outcome.hard_failures) {
    std::cerr << "HARD: " << msg << "\n";
  }
  for (const std::string& msg : outcome.soft_failures) {
    std::cerr << "soft: " << msg << "\n";
  }
  return outcome.exit_code();
}

int run_bounds_command(const std::string& chain_path,
                       const std::string& paths_path,
                       const std::string& family_kind, double p, double epsilon,
                       const std::string& eta_kind, bool minimize,
                       const std::string& out_path) {
  const std::string chain_text = read_text_file(chain_path);
  const ReversibleChain chain = chain_from_json(chain_text);

  json doc;
  doc["schema_version"] = schema_version;
  doc["inputs"] = {{"chain", chain_path},
                   {"chain_digest", hex_digest(text_digest(chain_text))}};
  doc["n"] = chain.n();
  const SpectralResult spectral = spectral_gap(chain);
  doc["spectral"] = {{"gap", spectral.gap},
                     {"lambda2", spectral.lambda2},
                     {"method", spectral.method}};

  ProbabilityVector eta = eta_kind == "uniform"
                              ? ProbabilityVector::uniform(chain.n())
                              : ProbabilityVector(chain.pi());
  doc["eta"] = eta_kind;

  const auto emit_path_bounds = [&](const PathFamily& family) {
    const BoundReport gap_bound = path_bound_gap(chain, family);
    doc["path_bound_inv_gap"] = {{"value", gap_bound.value},
                                 {"log_value", gap_bound.log_value}};
    const BoundReport l_bound = path_bound_L_eta(
        chain, family, WeightAssignment::unit(chain.n()), p, eta);
    doc["path_bound_inv_L_eta"] = {{"p", p},
                                   {"value", l_bound.value},
                                   {"log_value", l_bound.log_value}};
    const double log_T = log_mixing_time_bound(
        l_bound.log_value, l_bound.log_value, p, p, std::log(1.0 / epsilon));
    doc["mixing_time_bound"] = {{"epsilon", epsilon},
                                {"p", p},
                                {"p_prime", p},
                                {"log_value", log_T},
                                {"value", std::exp(log_T)}};
  };
  if (!paths_path.empty()) {
    const std::string paths_text = read_text_file(paths_path);
    const ExplicitPathFamily family = paths_from_json(paths_text, chain.n());
    doc["inputs"]["paths"] = paths_path;
    doc["inputs"]["paths_digest"] = hex_digest(text_digest(paths_text));
    emit_path_bounds(family);
  } else if (family_kind == "shortest") {
    doc["inputs"]["paths"] = "generated:shortest";
    emit_path_bounds(shortest_path_family(chain));
  }

  if (minimize) {
    const FunctionalConstantEstimate est =
        minimize_constant(chain, ConstantFamily::L, p);
    doc["numeric_L"] = {{"p", p},
                        {"upper_bound", est.upper_bound},
                        {"lower_bound", est.lower_bound ? json(*est.lower_bound)
                                                        : json()}};
  }
  emit(json(doc).dump(2) + "\n", out_path);
  return 0;
}

int run_rem_command(int N, double beta, std::uint64_t seed, double c, double c1,
                    double zeta_opt, double d_opt, double p_opt, double rho,
                    const std::string& out_path) {
  const RemInstance instance = sample_instance(N, beta, seed);
  const DerivedRemParams params =
      derive_rem_params(N, beta, c, c1, zeta_opt, d_opt, p_opt);

  json doc;
  doc["schema_version"] = schema_version;
  doc["N"] = N;
  doc["beta"] = beta;
  doc["beta_c"] = critical_beta;
  doc["seed"] = seed;
  doc["instance_digest"] = hex_digest(instance.content_digest);
  doc["log_z"] = log_partition(instance).log_value;
  if (N <= 14) {
    const ReversibleChain chain = metropolis_chain(instance);
    const double gap = spectral_gap(chain).gap;
    doc["gap"] = gap;
    doc["rate"] = -std::log(gap) / N;
    doc["target_rate"] = beta * critical_beta;
  }
  doc["statics"] = statics_to_json(
      static_bounds_check(instance, params.d, c, c1, rho, params.p));
  doc["occupation"] = occupation_to_json(occupation_profile(instance, params.d, c, c1));
  const LambdaWeightsReport weights = lambda_weights(instance, params.d, rho);
  doc["lambda"] = {{"d", params.d},
                   {"rho", rho},
                   {"low_count", weights.low_count},
                   {"empty_low_set", weights.empty_low_set},
                   {"log_z_low", weights.log_z_low}};
  emit(doc.dump(2) + "\n", out_path);
  return 0;
}

int run_env_command(int N, double beta, std::uint64_t seed, std::uint32_t sigma,
                    double t, int indep_seeds, double epsilon,
                    const std::vector<double>& tgrid,
                    const std::string& out_path) {
  const RemInstance instance = sample_instance(N, beta, seed);
  json doc;
  doc["schema_version"] = schema_version;
  doc["N"] = N;
  doc["beta"] = beta;
  doc["seed"] = seed;
  doc["instance_digest"] = hex_digest(instance.content_digest);

  const ShiftLemmaReport shift = shift_lemma_check(instance, sigma, t);
  doc["shift_lemma"] = {{"sigma", shift.sigma},
                        {"t", shift.t},
                        {"max_one_time_error", shift.max_one_time_error},
                        {"max_two_time_error", shift.max_two_time_error},
                        {"holds", shift.holds}};
  const InvarianceReport inv = invariance_reversibility_check(instance, t);
  doc["invariance"] = {{"t", inv.t},
                       {"max_invariance_error", inv.max_invariance_error},
                       {"max_symmetry_error", inv.max_symmetry_error},
                       {"holds", inv.holds}};
  const EnvironmentLaw law = nu_measure(instance);
  doc["nu"] = {{"atoms", law.representatives.size()},
               {"merged", law.merged},
               {"base_digest", hex_digest(law.base_digest)}};

  if (indep_seeds > 1) {
    const SigmaIndependenceReport si =
        sigma_independence_check(N, beta, t, indep_seeds, seed);
    doc["sigma_independence"] = {{"num_seeds", si.num_seeds},
                                 {"max_lo", si.max_lo},
                                 {"min_hi", si.min_hi},
                                 {"all_overlap", si.all_overlap}};
  }
  if (!tgrid.empty() && indep_seeds > 0) {
    const TAvReport tav =
        t_av_estimate(N, beta, epsilon, indep_seeds, tgrid, seed);
    doc["t_av"] = {{"epsilon", tav.epsilon},
                   {"reached_count", tav.reached_count},
                   {"mean", tav.mean},
                   {"ci_lo", tav.ci.lo},
                   {"ci_hi", tav.ci.hi},
                   {"insufficient_seeds", tav.insufficient_seeds}};
  }
  emit(doc.dump(2) + "\n", out_path);
  const bool ok = shift.holds && inv.holds;
  return ok ? 0 : 1;
}

int run_paths_command(int N, double beta, std::uint64_t seed, double c_e,
                      const std::string& variant_name,
                      const std::string& out_path) {
  const ThresholdVariant variant = variant_name == "text"
                                       ? ThresholdVariant::text
                                       : ThresholdVariant::proposition;
  const RemInstance instance = sample_instance(N, beta, seed);
  const RemPathFamily family(instance.H, N, c_e, variant);
  const PathCertificate cert = good_path_certificate(family);

  json doc;
  doc["schema_version"] = schema_version;
  doc["N"] = N;
  doc["seed"] = seed;
  doc["instance_digest"] = hex_digest(instance.content_digest);
  doc["c_e"] = c_e;
  doc["threshold_variant"] = variant_name;
  doc["threshold"] = family.classification().threshold();
  doc["cut"] = family.cut();
  doc["bad_count"] = family.classification().bad_count();
  doc["certificate"] = certificate_to_json(cert);
  emit(doc.dump(2) + "\n", out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional-inequality mixing bounds for reversible chains"};
  app.require_subcommand(1);

  // sweep
  auto* sweep_cmd = app.add_subcommand(
      "sweep", "Run the configured size/seed sweep and emit CSV + JSON");
  std::string config_path;
  std::string sweep_out;
  sweep_cmd->add_option("--config", config_path, "Experiment config JSON")
      ->required();
  sweep_cmd->add_option("--out", sweep_out,
                        "Output prefix (overrides the config)");

  // bounds
  auto* bounds_cmd = app.add_subcommand(
      "bounds", "Evaluate spectral and path bounds for a chain file");
  std::string chain_path, paths_path, eta_kind = "stationary", bounds_out;
  double bounds_p = 1.0, bounds_eps = 0.25;
  bool bounds_min = false;
  bounds_cmd->add_option("--chain", chain_path, "Chain JSON file")->required();
  bounds_cmd->add_option("--paths", paths_path, "Path family JSON file");
  std::string family_kind;
  bounds_cmd
      ->add_option("--family", family_kind,
                   "Generate a path family when --paths is absent: shortest "
                   "(lexicographic BFS)")
      ->check(CLI::IsMember({"shortest"}))
      ->excludes("--paths");
  bounds_cmd->add_option("--p", bounds_p, "Exponent p in (0, 1]");
  bounds_cmd->add_option("--epsilon", bounds_eps, "Level for the time bound");
  bounds_cmd->add_option("--eta", eta_kind, "Start bias: stationary | uniform")
      ->check(CLI::IsMember({"stationary", "uniform"}));
  bounds_cmd->add_flag("--minimize", bounds_min,
                       "Also search numerically for the constant");
  bounds_cmd->add_option("--out", bounds_out, "Write the JSON here");

  // rem
  auto* rem_cmd = app.add_subcommand(
      "rem", "Sample a random-energy instance and report statics");
  int rem_N = 8;
  double rem_beta = 0.75 * critical_beta;
  std::uint64_t rem_seed = 1;
  double rem_c = 0.1, rem_c1 = 1.0, rem_zeta = -1.0, rem_d = -1.0,
         rem_p = -1.0, rem_rho = 0.75;
  std::string rem_out;
  rem_cmd->add_option("--N", rem_N, "Number of sites")->required();
  rem_cmd->add_option("--beta", rem_beta, "Inverse temperature");
  rem_cmd->add_option("--seed", rem_seed, "Disorder seed");
  rem_cmd->add_option("--c", rem_c, "Slack constant c");
  rem_cmd->add_option("--c1", rem_c1, "Slack constant c1");
  rem_cmd->add_option("--zeta", rem_zeta, "Override zeta (else derived)");
  rem_cmd->add_option("--d", rem_d, "Override d (else beta (1 + zeta))");
  rem_cmd->add_option("--p", rem_p, "Override p (else derived)");
  rem_cmd->add_option("--rho", rem_rho, "Trap-weight exponent rho");
  rem_cmd->add_option("--out", rem_out, "Write the JSON here");

  // env
  auto* env_cmd = app.add_subcommand(
      "env", "Check the environment-view identities on a sampled instance");
  int env_N = 3, env_seeds = 0;
  double env_beta = 1.0, env_t = 1.0, env_eps = 0.25;
  std::uint64_t env_seed = 1;
  std::uint32_t env_sigma = 1;
  std::vector<double> env_tgrid;
  std::string env_out;
  env_cmd->add_option("--N", env_N, "Number of sites")->required();
  env_cmd->add_option("--beta", env_beta, "Inverse temperature");
  env_cmd->add_option("--seed", env_seed, "Disorder seed");
  env_cmd->add_option("--sigma", env_sigma, "Shift group element");
  env_cmd->add_option("--t", env_t, "Check time");
  env_cmd->add_option("--seeds", env_seeds,
                      "Instances for the start-independence check");
  env_cmd->add_option("--epsilon", env_eps, "Level for the averaged time");
  env_cmd->add_option("--tgrid", env_tgrid,
                      "Time grid for the averaged-time estimate")
      ->delimiter(',');
  env_cmd->add_option("--out", env_out, "Write the JSON here");

  // paths
  auto* paths_cmd = app.add_subcommand(
      "paths", "Select canonical paths on a sampled landscape and certify them");
  int paths_N = 6;
  double paths_beta = 0.0, paths_ce = 1.0;
  std::uint64_t paths_seed = 1;
  std::string paths_variant = "proposition", paths_out;
  paths_cmd->add_option("--N", paths_N, "Number of sites")->required();
  paths_cmd->add_option("--beta", paths_beta, "Inverse temperature (digest only)");
  paths_cmd->add_option("--seed", paths_seed, "Disorder seed");
  paths_cmd->add_option("--c_e", paths_ce, "Threshold constant");
  paths_cmd->add_option("--variant", paths_variant,
                        "Threshold variant: proposition | text")
      ->check(CLI::IsMember({"proposition", "text"}));
  paths_cmd->add_option("--out", paths_out, "Write the JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sweep_cmd->parsed()) return run_sweep_command(config_path, sweep_out);
    if (bounds_cmd->parsed()) {
      return run_bounds_command(chain_path, paths_path, family_kind, bounds_p,
                                bounds_eps, eta_kind, bounds_min, bounds_out);
    }
    if (rem_cmd->parsed()) {
      return run_rem_command(rem_N, rem_beta, rem_seed, rem_c, rem_c1, rem_zeta,
                             rem_d, rem_p, rem_rho, rem_out);
    }
    if (env_cmd->parsed()) {
      return run_env_command(env_N, env_beta, env_seed, env_sigma, env_t,
                             env_seeds, env_eps, env_tgrid, env_out);
    }
    if (paths_cmd->parsed()) {
      return run_paths_command(paths_N, paths_beta, paths_seed, paths_ce,
                               paths_variant, paths_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
