// Tests for the experiment driver: strict config parsing, deterministic
// sweep output, the exit-code contract, and the tail-quantile estimator.
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mixbound/errors.hpp"
#include "mixbound/json_io.hpp"
#include "mixbound/rem.hpp"
#include "mixbound/sweep.hpp"
#include "mixbound/util.hpp"

using namespace mixbound;

TEST_CASE("config parsing: defaults and beta resolution") {
  const std::string text = R"({"N_list": [4, 6], "beta": 0.5, "num_seeds": 3})";
  const ExperimentConfig cfg = config_from_json(text);
  CHECK(cfg.N_list == std::vector<int>{4, 6});
  CHECK(cfg.beta == 0.5);
  CHECK(cfg.num_seeds == 3);
  CHECK(cfg.base_seed == 1);
  CHECK(cfg.epsilon == 0.25);
  CHECK(cfg.c_e == 1.0);
  CHECK(cfg.rho == 0.75);
  CHECK(cfg.variant == ThresholdVariant::proposition);
  CHECK(cfg.certify_paths);
  CHECK(cfg.exact_max_N == 10);
  CHECK(cfg.zeta_override < 0.0);
  CHECK(cfg.source_digest == text_digest(text));

  const ExperimentConfig ratio = config_from_json(
      R"({"N_list": [4], "beta_over_beta_c": 0.75, "num_seeds": 1})");
  CHECK(ratio.beta == doctest::Approx(0.75 * critical_beta).epsilon(1e-15));

  const ExperimentConfig full = config_from_json(
      R"({"schema_version": 1, "N_list": [4], "beta": 1.0, "num_seeds": 2,
          "base_seed": 9, "epsilon": 0.5, "c_e": 2.0, "c": 0.2, "c1": 1.5,
          "threshold_variant": "text", "rho": 0.5, "zeta": 0.3, "d": 1.2,
          "p": 0.4, "p_prime": 0.3, "certify_paths": false,
          "exact_max_N": 6, "output_prefix": "out/run"})");
  CHECK(full.variant == ThresholdVariant::text);
  CHECK(full.zeta_override == 0.3);
  CHECK(full.d_override == 1.2);
  CHECK(full.p_override == 0.4);
  CHECK(full.p_prime_override == 0.3);
  CHECK_FALSE(full.certify_paths);
  CHECK(full.exact_max_N == 6);
  CHECK(full.output_prefix == "out/run");
}

TEST_CASE("config parsing rejects malformed input") {
  // Unknown key.
  CHECK_THROWS_AS(config_from_json(
                      R"({"N_list": [4], "beta": 1.0, "num_seeds": 1, "bogus": 2})"),
                  Error);
  // Both beta forms, then neither.
  CHECK_THROWS_AS(
      config_from_json(
          R"({"N_list": [4], "beta": 1.0, "beta_over_beta_c": 0.5, "num_seeds": 1})"),
      Error);
  CHECK_THROWS_AS(config_from_json(R"({"N_list": [4], "num_seeds": 1})"),
                  Error);
  // Missing / empty N_list and out-of-range sizes.
  CHECK_THROWS_AS(config_from_json(R"({"beta": 1.0, "num_seeds": 1})"), Error);
  CHECK_THROWS_AS(
      config_from_json(R"({"N_list": [], "beta": 1.0, "num_seeds": 1})"),
      Error);
  CHECK_THROWS_AS(
      config_from_json(R"({"N_list": [1], "beta": 1.0, "num_seeds": 1})"),
      Error);
  CHECK_THROWS_AS(
      config_from_json(R"({"N_list": [15], "beta": 1.0, "num_seeds": 1})"),
      Error);
  // num_seeds missing or non-positive.
  CHECK_THROWS_AS(config_from_json(R"({"N_list": [4], "beta": 1.0})"), Error);
  CHECK_THROWS_AS(
      config_from_json(R"({"N_list": [4], "beta": 1.0, "num_seeds": 0})"),
      Error);
  // beta and epsilon domains.
  CHECK_THROWS_AS(
      config_from_json(R"({"N_list": [4], "beta": -1.0, "num_seeds": 1})"),
      Error);
  CHECK_THROWS_AS(
      config_from_json(
          R"({"N_list": [4], "beta": 1.0, "num_seeds": 1, "epsilon": 2.0})"),
      Error);
  // Variant and schema version.
  CHECK_THROWS_AS(
      config_from_json(
          R"({"N_list": [4], "beta": 1.0, "num_seeds": 1, "threshold_variant": "x"})"),
      Error);
  CHECK_THROWS_AS(
      config_from_json(
          R"({"schema_version": 2, "N_list": [4], "beta": 1.0, "num_seeds": 1})"),
      Error);
  // Not an object / not JSON at all.
  CHECK_THROWS_AS(config_from_json("[1, 2]"), Error);
  CHECK_THROWS_AS(config_from_json("not json"), Error);
}

TEST_CASE("tiny sweep: certified records, reproducible bytes, exit contract") {
  const std::string text =
      R"({"N_list": [3, 4], "beta": 0.6, "num_seeds": 2, "base_seed": 11})";
  const ExperimentConfig cfg = config_from_json(text);
  const SweepOutcome a = run_sweep(cfg);
  REQUIRE(a.records.size() == 4);
  // Certified inequalities hold on every record: no hard failures, whatever
  // the soft trend flags say at this scale.
  CHECK(a.hard_failures.empty());
  CHECK((a.exit_code() == 0 || a.exit_code() == 2));
  CHECK((a.exit_code() == 2) == !a.soft_failures.empty());

  for (const SweepRecord& r : a.records) {
    CHECK(r.gap > 0.0);
    CHECK(r.rate == doctest::Approx(-std::log(r.gap) / r.N).epsilon(1e-12));
    // Path bound certifies the gap from below: gap >= 1 / path_inv_gap.
    CHECK(r.gap * r.path_inv_gap >= 1.0 - 1e-8);
    CHECK(std::isfinite(r.log_path_inv_L_eta));
    CHECK(std::isfinite(r.log_path_inv_L));
    CHECK(std::isfinite(r.log_T_theory));
    CHECK(r.exact_computed);  // N <= exact_max_N here
    CHECK(r.t_eta_lower <= r.t_eta_upper);
    // The certified exact time respects the theory bound.
    CHECK(std::log(r.t_eta_lower) <= r.log_T_theory + 1e-8);
    CHECK(r.certificate_computed);
    CHECK(r.good_fraction >= 0.0);
    CHECK(r.good_fraction <= 1.0);
    CHECK(r.max_path_length <= r.N);
    CHECK(r.statics_computed);
    CHECK(r.instance_digest != 0);
  }
  // Seeds are mixed per (base_seed, N, index): distinct across sizes.
  CHECK(a.records[0].instance_seed != a.records[2].instance_seed);

  // Byte-identical rerun.
  const SweepOutcome b = run_sweep(config_from_json(text));
  CHECK(a.csv_text == b.csv_text);
  CHECK(a.json_text == b.json_text);

  // CSV shape: header plus one line per record.
  std::size_t lines = 0;
  for (char ch : a.csv_text) lines += ch == '\n';
  CHECK(lines == a.records.size() + 1);
  CHECK(a.csv_text.rfind("N,seed_index", 0) == 0);

  // JSON shape and digest plumbing.
  const nlohmann::json doc = nlohmann::json::parse(a.json_text);
  CHECK(doc.at("schema_version").get<int>() == schema_version);
  CHECK(doc.at("records").size() == 4);
  CHECK(doc.at("config_digest").get<std::string>() ==
        hex_digest(cfg.source_digest));
  CHECK(doc.contains("summary"));
  CHECK(doc.at("hard_failures").empty());
  // Soft failures agree between the outcome object and the document.
  CHECK(doc.at("soft_failures").size() == a.soft_failures.size());
}

TEST_CASE("sweep honors overrides and the exact-size cutoff") {
  ExperimentConfig cfg = config_from_json(
      R"({"N_list": [4], "beta": 0.7, "num_seeds": 1, "exact_max_N": 3,
          "certify_paths": false, "p": 0.5, "p_prime": 0.5, "d": 1.4,
          "zeta": 1.0})");
  const SweepOutcome out = run_sweep(cfg);
  REQUIRE(out.records.size() == 1);
  const SweepRecord& r = out.records[0];
  CHECK_FALSE(r.exact_computed);  // N = 4 > exact_max_N = 3
  CHECK(std::isnan(r.t_eta_lower));
  CHECK(std::isnan(r.t_eta_upper));
  CHECK_FALSE(r.certificate_computed);
  CHECK(r.p == 0.5);
  CHECK(r.p_prime == 0.5);
  CHECK(r.d == 1.4);
  CHECK(r.zeta == 1.0);
  CHECK(out.hard_failures.empty());
}

TEST_CASE("invalid derived exponents are rejected") {
  // p = 1 is allowed; p > 1 must be rejected before any heavy work.
  ExperimentConfig cfg = config_from_json(
      R"({"N_list": [3], "beta": 0.7, "num_seeds": 1, "p": 1.5})");
  CHECK_THROWS_AS(run_sweep(cfg), NonPositiveInput);
  ExperimentConfig empty;
  CHECK_THROWS_AS(run_sweep(empty), NonPositiveInput);
}

TEST_CASE("tail-quantile estimator hand check") {
  std::vector<SweepRecord> records;
  for (int i = 1; i <= 30; ++i) {
    SweepRecord r;
    r.N = 4;
    r.exact_computed = true;
    r.t_eta_upper = static_cast<double>(31 - i);  // unsorted on purpose
    records.push_back(r);
  }
  // A non-certified record must be ignored.
  SweepRecord skip;
  skip.N = 4;
  skip.exact_computed = false;
  skip.t_eta_upper = 1e9;
  records.push_back(skip);

  const auto ests = t_n_estimator(records, 0.25, 0.5);
  REQUIRE(ests.size() == 1);
  CHECK(ests[0].N == 4);
  CHECK(ests[0].num_records == 30);
  CHECK(ests[0].epsilon == 0.25);
  CHECK(ests[0].c == 0.5);
  const double level = 1.0 - std::exp(-0.5 * 4);
  CHECK(ests[0].quantile_level == doctest::Approx(level).epsilon(1e-15));
  // ceil(level * 30) - 1 = 26 - 1: the 26th order statistic of 1..30.
  CHECK(ests[0].value == 26.0);
}

TEST_CASE("tail-quantile estimator error taxonomy") {
  std::vector<SweepRecord> records;
  for (int i = 0; i < 29; ++i) {
    SweepRecord r;
    r.N = 5;
    r.exact_computed = true;
    r.t_eta_upper = 1.0 + i;
    records.push_back(r);
  }
  CHECK_THROWS_AS(t_n_estimator(records, 0.25, 0.5), InsufficientSeeds);
  CHECK_THROWS_AS(t_n_estimator({}, 0.25, 0.5), InsufficientSeeds);
  CHECK_THROWS_AS(t_n_estimator(records, 0.25, 0.0), NonPositiveInput);
}

TEST_CASE("exit-code mapping") {
  SweepOutcome out;
  CHECK(out.exit_code() == 0);
  out.soft_failures.push_back("trend");
  CHECK(out.exit_code() == 2);
  out.hard_failures.push_back("violation");
  CHECK(out.exit_code() == 1);  // hard beats soft
}
