#include "mixbound/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mixbound/constants.hpp"
#include "mixbound/errors.hpp"
#include "mixbound/json_io.hpp"
#include "mixbound/path_bounds.hpp"
#include "mixbound/rem.hpp"
#include "mixbound/semigroup.hpp"
#include "mixbound/spectral.hpp"
#include "mixbound/util.hpp"

namespace mixbound {

namespace {

using nlohmann::json;

const double kNan = std::numeric_limits<double>::quiet_NaN();

std::uint64_t mix_seed(std::uint64_t base, int N, int s) {
  Fnv1a64 mix;
  mix.update(base);
  mix.update(static_cast<std::int64_t>(N));
  mix.update(static_cast<std::int64_t>(s));
  return mix.digest();
}

WeightAssignment to_assignment(const Eigen::VectorXd& lambda,
                               const Eigen::VectorXd& mu) {
  WeightAssignment wa;
  wa.lambda.assign(lambda.data(), lambda.data() + lambda.size());
  wa.mu.assign(mu.data(), mu.data() + mu.size());
  return wa;
}

}  // namespace

// -----------------------------------------------------------------------------
// config
// -----------------------------------------------------------------------------

ExperimentConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed experiment config: ") + e.what());
  }
  if (!doc.is_object()) throw Error("experiment config must be a JSON object");

  static const std::vector<std::string> known = {
      "schema_version", "N_list",       "beta",
      "beta_over_beta_c", "num_seeds",  "base_seed",
      "epsilon",        "c_e",          "c",
      "c1",             "threshold_variant", "rho",
      "zeta",           "d",            "p",
      "p_prime",        "certify_paths", "exact_max_N",
      "output_prefix"};
  for (const auto& item : doc.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw Error("experiment config: unknown key \"" + item.key() + "\"");
    }
  }
  if (doc.contains("schema_version") &&
      doc["schema_version"].get<int>() != schema_version) {
    throw Error("experiment config: unsupported schema_version");
  }

  ExperimentConfig config;
  config.source_digest = text_digest(text);
  if (!doc.contains("N_list") || !doc["N_list"].is_array() ||
      doc["N_list"].empty()) {
    throw Error("experiment config: N_list must be a non-empty array");
  }
  for (const auto& v : doc["N_list"]) {
    const int N = v.get<int>();
    if (N < 2 || N > 14) {
      throw Error("experiment config: N_list entries must lie in [2, 14]");
    }
    config.N_list.push_back(N);
  }
  const bool has_beta = doc.contains("beta");
  const bool has_ratio = doc.contains("beta_over_beta_c");
  if (has_beta == has_ratio) {
    throw Error(
        "experiment config: give exactly one of beta, beta_over_beta_c");
  }
  config.beta = has_beta ? doc["beta"].get<double>()
                         : doc["beta_over_beta_c"].get<double>() * critical_beta;
  if (!(config.beta > 0.0)) {
    throw Error("experiment config: beta must be positive");
  }
  if (!doc.contains("num_seeds")) {
    throw Error("experiment config: num_seeds is required");
  }
  config.num_seeds = doc["num_seeds"].get<int>();
  if (config.num_seeds < 1) {
    throw Error("experiment config: num_seeds must be >= 1");
  }
  if (doc.contains("base_seed")) {
    config.base_seed = doc["base_seed"].get<std::uint64_t>();
  }
  if (doc.contains("epsilon")) config.epsilon = doc["epsilon"].get<double>();
  if (!(config.epsilon > 0.0) || !(config.epsilon < 2.0)) {
    throw Error("experiment config: epsilon must lie in (0, 2)");
  }
  if (doc.contains("c_e")) config.c_e = doc["c_e"].get<double>();
  if (doc.contains("c")) config.c = doc["c"].get<double>();
  if (doc.contains("c1")) config.c1 = doc["c1"].get<double>();
  if (doc.contains("threshold_variant")) {
    const std::string v = doc["threshold_variant"].get<std::string>();
    if (v == "proposition") {
      config.variant = ThresholdVariant::proposition;
    } else if (v == "text") {
      config.variant = ThresholdVariant::text;
    } else {
      throw Error("experiment config: threshold_variant must be "
                  "\"proposition\" or \"text\"");
    }
  }
  if (doc.contains("rho")) config.rho = doc["rho"].get<double>();
  if (doc.contains("zeta")) config.zeta_override = doc["zeta"].get<double>();
  if (doc.contains("d")) config.d_override = doc["d"].get<double>();
  if (doc.contains("p")) config.p_override = doc["p"].get<double>();
  if (doc.contains("p_prime")) {
    config.p_prime_override = doc["p_prime"].get<double>();
  }
  if (doc.contains("certify_paths")) {
    config.certify_paths = doc["certify_paths"].get<bool>();
  }
  if (doc.contains("exact_max_N")) {
    config.exact_max_N = doc["exact_max_N"].get<int>();
  }
  if (doc.contains("output_prefix")) {
    config.output_prefix = doc["output_prefix"].get<std::string>();
  }
  return config;
}

// -----------------------------------------------------------------------------
// the sweep
// -----------------------------------------------------------------------------

namespace {

struct DerivedParams {
  double zeta, d, p, p_prime;
};

DerivedParams derive_params(const ExperimentConfig& config, int N) {
  DerivedParams out{};
  const double beta = config.beta;
  const double logN = std::log(static_cast<double>(N));
  if (config.zeta_override >= 0.0) {
    out.zeta = config.zeta_override;
  } else {
    out.zeta = std::sqrt(12.0 * (critical_beta / beta) *
                         std::sqrt(config.c1 * (1.0 + config.c) * logN / N));
  }
  out.d = config.d_override >= 0.0 ? config.d_override : beta * (1.0 + out.zeta);
  if (config.p_override > 0.0) {
    out.p = config.p_override;
  } else {
    const double r = (2.0 / 3.0) *
                     (beta * beta / (critical_beta * critical_beta + beta * beta)) *
                     out.zeta * out.zeta;
    out.p = r / (1.0 + r);
  }
  out.p_prime =
      config.p_prime_override > 0.0 ? config.p_prime_override : out.p;
  if (!(out.p > 0.0) || out.p > 1.0 || !(out.p_prime > 0.0) ||
      out.p_prime > 1.0) {
    throw NonPositiveInput("run_sweep: derived p, p' must lie in (0, 1]");
  }
  return out;
}

std::string csv_header() {
  return "N,seed_index,instance_seed,instance_digest,beta,epsilon,p,p_prime,"
         "zeta,d,rho,gap,rate,path_inv_gap,log_path_inv_L_eta,log_path_inv_L,"
         "log_T_theory,T_theory,exact_computed,t_eta_lower,t_eta_upper,"
         "certificate_computed,good_fraction,long_fallbacks,short_fallbacks,"
         "max_path_length,statics_computed,statics_holds,R,R_ok,"
         "z_lower_holds,z_low_upper_holds,empty_low_set,zeta_in_range,"
         "p_below_half\n";
}

std::string csv_row(const SweepRecord& r) {
  std::ostringstream out;
  out << r.N << ',' << r.seed_index << ',' << r.instance_seed << ','
      << hex_digest(r.instance_digest) << ',' << format_double(r.beta) << ','
      << format_double(r.epsilon) << ',' << format_double(r.p) << ','
      << format_double(r.p_prime) << ',' << format_double(r.zeta) << ','
      << format_double(r.d) << ',' << format_double(r.rho) << ','
      << format_double(r.gap) << ',' << format_double(r.rate) << ','
      << format_double(r.path_inv_gap) << ','
      << format_double(r.log_path_inv_L_eta) << ','
      << format_double(r.log_path_inv_L) << ','
      << format_double(r.log_T_theory) << ',' << format_double(r.T_theory)
      << ',' << int(r.exact_computed) << ',' << format_double(r.t_eta_lower)
      << ',' << format_double(r.t_eta_upper) << ','
      << int(r.certificate_computed) << ',' << format_double(r.good_fraction)
      << ',' << r.long_fallbacks << ',' << r.short_fallbacks << ','
      << r.max_path_length << ',' << int(r.statics_computed) << ','
      << int(r.statics_holds) << ',' << format_double(r.R) << ','
      << int(r.R_ok) << ',' << int(r.z_lower_holds) << ','
      << int(r.z_low_upper_holds) << ',' << int(r.empty_low_set) << ','
      << int(r.zeta_in_range) << ',' << int(r.p_below_half) << '\n';
  return out.str();
}

json record_to_json(const SweepRecord& r) {
  json obj;
  obj["N"] = r.N;
  obj["seed_index"] = r.seed_index;
  obj["instance_seed"] = r.instance_seed;
  obj["instance_digest"] = hex_digest(r.instance_digest);
  obj["beta"] = r.beta;
  obj["epsilon"] = r.epsilon;
  obj["p"] = r.p;
  obj["p_prime"] = r.p_prime;
  obj["zeta"] = r.zeta;
  obj["d"] = r.d;
  obj["rho"] = r.rho;
  obj["gap"] = r.gap;
  obj["rate"] = r.rate;
  obj["path_inv_gap"] = r.path_inv_gap;
  obj["log_path_inv_L_eta"] = r.log_path_inv_L_eta;
  obj["log_path_inv_L"] = r.log_path_inv_L;
  obj["log_T_theory"] = r.log_T_theory;
  obj["T_theory"] = r.T_theory;
  obj["exact_computed"] = r.exact_computed;
  obj["t_eta_lower"] = r.t_eta_lower;
  obj["t_eta_upper"] = r.t_eta_upper;
  obj["certificate_computed"] = r.certificate_computed;
  obj["good_fraction"] = r.good_fraction;
  obj["long_fallbacks"] = r.long_fallbacks;
  obj["short_fallbacks"] = r.short_fallbacks;
  obj["max_path_length"] = r.max_path_length;
  obj["statics_computed"] = r.statics_computed;
  obj["statics_holds"] = r.statics_holds;
  obj["R"] = r.R;
  obj["R_ok"] = r.R_ok;
  obj["z_lower_holds"] = r.z_lower_holds;
  obj["z_low_upper_holds"] = r.z_low_upper_holds;
  obj["empty_low_set"] = r.empty_low_set;
  obj["zeta_in_range"] = r.zeta_in_range;
  obj["p_below_half"] = r.p_below_half;
  return obj;
}

}  // namespace

SweepOutcome run_sweep(const ExperimentConfig& config) {
  if (config.N_list.empty() || config.num_seeds < 1) {
    throw NonPositiveInput("run_sweep: config must list sizes and seeds");
  }
  SweepOutcome outcome;
  std::ostringstream csv;
  csv << csv_header();

  int exact_skipped = 0;
  int statics_soft = 0;
  int z_ref_soft = 0;

  for (int N : config.N_list) {
    const DerivedParams params = derive_params(config, N);
    for (int s = 0; s < config.num_seeds; ++s) {
      SweepRecord rec;
      rec.N = N;
      rec.seed_index = s;
      rec.instance_seed = mix_seed(config.base_seed, N, s);
      rec.beta = config.beta;
      rec.epsilon = config.epsilon;
      rec.p = params.p;
      rec.p_prime = params.p_prime;
      rec.zeta = params.zeta;
      rec.d = params.d;
      rec.rho = config.rho;
      rec.t_eta_lower = kNan;
      rec.t_eta_upper = kNan;

      const RemInstance instance =
          sample_instance(N, config.beta, rec.instance_seed);
      rec.instance_digest = instance.content_digest;
      const ReversibleChain chain = metropolis_chain(instance);
      rec.gap = spectral_gap(chain).gap;
      rec.rate = -std::log(rec.gap) / N;

      const RemPathFamily family(instance.H, N, config.c_e, config.variant);
      const BoundReport gap_bound = path_bound_gap(chain, family);
      rec.path_inv_gap = gap_bound.value;
      if (rec.gap * rec.path_inv_gap < 1.0 - 1e-8) {
        outcome.hard_failures.push_back(
            "N=" + std::to_string(N) + " seed=" + std::to_string(s) +
            ": spectral gap " + format_double(rec.gap) +
            " below certified path lower bound " +
            format_double(1.0 / rec.path_inv_gap));
      }

      const LambdaWeightsReport weights =
          lambda_weights(instance, params.d, config.rho);
      const ProbabilityVector eta = ProbabilityVector::uniform(chain.n());
      const ProbabilityVector pi_measure(chain.pi());
      const WeightAssignment wa_eta =
          params.p_prime == 1.0 ? WeightAssignment::unit(chain.n())
                                : to_assignment(weights.lambda, weights.mu);
      const WeightAssignment wa_pi =
          params.p == 1.0 ? WeightAssignment::unit(chain.n())
                          : to_assignment(weights.lambda, weights.mu);
      rec.log_path_inv_L_eta =
          path_bound_L_eta(chain, family, wa_eta, params.p_prime, eta)
              .log_value;
      rec.log_path_inv_L =
          path_bound_L_eta(chain, family, wa_pi, params.p, pi_measure)
              .log_value;
      rec.log_T_theory = log_mixing_time_bound(
          rec.log_path_inv_L_eta, rec.log_path_inv_L, params.p, params.p_prime,
          std::log(1.0 / config.epsilon));
      rec.T_theory = std::exp(rec.log_T_theory);

      if (N <= config.exact_max_N) {
        try {
          const TEtaBracket bracket = t_eta(chain, eta, config.epsilon);
          rec.exact_computed = true;
          rec.t_eta_lower = bracket.t_lo;
          rec.t_eta_upper = bracket.t_hi;
          if (std::log(rec.t_eta_lower) > rec.log_T_theory + 1e-8) {
            outcome.hard_failures.push_back(
                "N=" + std::to_string(N) + " seed=" + std::to_string(s) +
                ": certified lower time " + format_double(rec.t_eta_lower) +
                " exceeds the theory upper bound exp(" +
                format_double(rec.log_T_theory) + ")");
          }
          if (std::log(rec.t_eta_upper) > rec.log_T_theory) {
            outcome.soft_failures.push_back(
                "N=" + std::to_string(N) + " seed=" + std::to_string(s) +
                ": certified upper time " + format_double(rec.t_eta_upper) +
                " exceeds the theory bound exp(" +
                format_double(rec.log_T_theory) + ")");
          }
        } catch (const NotReachedWithinHorizon&) {
          ++exact_skipped;
        }
      }

      if (config.certify_paths) {
        const PathCertificate cert = good_path_certificate(family);
        rec.certificate_computed = true;
        rec.good_fraction = cert.all_interior_good_fraction;
        rec.long_fallbacks = cert.long_fallbacks;
        rec.short_fallbacks = cert.short_fallbacks;
        rec.max_path_length = cert.max_length;
        if (cert.length_violations > 0) {
          outcome.hard_failures.push_back(
              "N=" + std::to_string(N) + " seed=" + std::to_string(s) +
              ": selected paths exceed N steps");
        }
      }

      const StaticBoundsReport statics = static_bounds_check(
          instance, params.d, config.c, config.c1, config.rho, params.p);
      rec.statics_computed = true;
      rec.statics_holds = statics.statics_holds;
      rec.R = statics.R;
      rec.R_ok = statics.R_ok;
      rec.z_lower_holds = statics.z_lower_holds;
      rec.z_low_upper_holds = statics.z_low_upper_holds;
      rec.empty_low_set = statics.empty_low_set;
      rec.zeta_in_range = statics.zeta_in_range;
      rec.p_below_half = params.p < 0.5;
      if (!statics.statics_holds || !statics.R_ok) ++statics_soft;
      if (!statics.z_lower_holds || !statics.z_low_upper_holds) ++z_ref_soft;

      csv << csv_row(rec);
      outcome.records.push_back(rec);
    }
  }

  if (exact_skipped > 0) {
    outcome.soft_failures.push_back(
        std::to_string(exact_skipped) +
        " record(s): exact bracket not certified within the time horizon");
  }
  if (statics_soft > 0) {
    outcome.soft_failures.push_back(
        std::to_string(statics_soft) +
        " record(s): parameter statics (balance condition or R <= 2) not met "
        "at this size");
  }
  if (z_ref_soft > 0) {
    outcome.soft_failures.push_back(
        std::to_string(z_ref_soft) +
        " record(s): partition function outside its typical-disorder "
        "reference bracket");
  }

  // Aggregate trend: does the median rate approach beta beta_c with N?
  const double target = config.beta * critical_beta;
  std::map<int, std::vector<double>> rates_by_N;
  std::map<int, std::vector<double>> uppers_by_N;
  std::map<int, int> separated_by_N;
  std::map<int, int> exact_by_N;
  for (const SweepRecord& r : outcome.records) {
    rates_by_N[r.N].push_back(r.rate);
    if (r.exact_computed) {
      uppers_by_N[r.N].push_back(r.t_eta_upper);
      ++exact_by_N[r.N];
      if (r.t_eta_upper < 1.0 / r.gap) ++separated_by_N[r.N];
    }
  }
  json summary;
  if (!rates_by_N.empty()) {
    const int N_min = rates_by_N.begin()->first;
    const int N_max = rates_by_N.rbegin()->first;
    const double dev_min =
        std::abs(median(rates_by_N.at(N_min)) - target);
    const double dev_max =
        std::abs(median(rates_by_N.at(N_max)) - target);
    if (N_max > N_min && dev_max > dev_min) {
      outcome.soft_failures.push_back(
          "median gap rate moved away from the limit " +
          format_double(target) + " between N=" + std::to_string(N_min) +
          " and N=" + std::to_string(N_max));
    }
    json per_N = json::array();
    for (const auto& [N, rates] : rates_by_N) {
      json row;
      row["N"] = N;
      row["median_rate"] = median(rates);
      row["target_rate"] = target;
      if (exact_by_N.count(N) && exact_by_N.at(N) > 0) {
        row["median_t_eta_upper"] = median(uppers_by_N.at(N));
        row["separation_fraction"] =
            static_cast<double>(separated_by_N[N]) / exact_by_N.at(N);
      }
      per_N.push_back(row);
    }
    summary["per_N"] = per_N;
    if (exact_by_N.count(N_max) && exact_by_N.at(N_max) > 0) {
      const double frac =
          static_cast<double>(separated_by_N[N_max]) / exact_by_N.at(N_max);
      if (frac < 0.9) {
        outcome.soft_failures.push_back(
            "separation t_eta_upper < 1/gap held for only " +
            format_double(frac) + " of seeds at N=" + std::to_string(N_max));
      }
    }
  }

  outcome.csv_text = csv.str();

  json doc;
  doc["schema_version"] = schema_version;
  doc["config_digest"] = hex_digest(config.source_digest);
  json cfg;
  cfg["N_list"] = config.N_list;
  cfg["beta"] = config.beta;
  cfg["num_seeds"] = config.num_seeds;
  cfg["base_seed"] = config.base_seed;
  cfg["epsilon"] = config.epsilon;
  cfg["c_e"] = config.c_e;
  cfg["c"] = config.c;
  cfg["c1"] = config.c1;
  cfg["threshold_variant"] = config.variant == ThresholdVariant::proposition
                                 ? "proposition"
                                 : "text";
  cfg["rho"] = config.rho;
  cfg["certify_paths"] = config.certify_paths;
  cfg["exact_max_N"] = config.exact_max_N;
  doc["config"] = cfg;
  json records = json::array();
  for (const SweepRecord& r : outcome.records) records.push_back(record_to_json(r));
  doc["records"] = records;
  doc["summary"] = summary;
  doc["hard_failures"] = outcome.hard_failures;
  doc["soft_failures"] = outcome.soft_failures;
  outcome.json_text = doc.dump(2) + "\n";
  return outcome;
}

// -----------------------------------------------------------------------------
// tail-quantile estimator
// -----------------------------------------------------------------------------

std::vector<TnEstimate> t_n_estimator(const std::vector<SweepRecord>& records,
                                      double epsilon, double c) {
  if (!(c > 0.0)) throw NonPositiveInput("t_n_estimator: need c > 0");
  std::map<int, std::vector<double>> times_by_N;
  for (const SweepRecord& r : records) {
    if (r.exact_computed && std::isfinite(r.t_eta_upper)) {
      times_by_N[r.N].push_back(r.t_eta_upper);
    }
  }
  if (times_by_N.empty()) {
    throw InsufficientSeeds("t_n_estimator: no records with a certified time");
  }
  std::vector<TnEstimate> out;
  for (auto& [N, times] : times_by_N) {
    if (times.size() < 30) {
      throw InsufficientSeeds(
          "t_n_estimator: N=" + std::to_string(N) + " has only " +
          std::to_string(times.size()) + " certified records (need >= 30)");
    }
    std::sort(times.begin(), times.end());
    TnEstimate est;
    est.N = N;
    est.epsilon = epsilon;
    est.c = c;
    est.quantile_level = 1.0 - std::exp(-c * N);
    est.num_records = static_cast<int>(times.size());
    const auto m = static_cast<double>(times.size());
    auto idx = static_cast<std::size_t>(std::ceil(est.quantile_level * m)) - 1;
    idx = std::min(idx, times.size() - 1);
    est.value = times[idx];
    out.push_back(est);
  }
  return out;
}

}  // namespace mixbound
