#include "mixbound/rem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixbound/errors.hpp"
#include "mixbound/spectral.hpp"
#include "mixbound/util.hpp"

namespace mixbound {

namespace {

constexpr int kMaxSampleSites = 24;
constexpr int kMaxChainSites = 14;
const double kInf = std::numeric_limits<double>::infinity();

void check_instance(const RemInstance& instance, const char* who) {
  if (instance.N < 1 || instance.N > kMaxSampleSites) {
    throw NonPositiveInput(std::string(who) + ": invalid N = " +
                           std::to_string(instance.N));
  }
  if (instance.H.size() != (1LL << instance.N)) {
    throw NonPositiveInput(std::string(who) + ": H has " +
                           std::to_string(instance.H.size()) +
                           " entries, expected 2^" + std::to_string(instance.N));
  }
}

bool constraint_accepts(const PartitionConstraint& constraint, double H_x,
                        int N) {
  switch (constraint.kind) {
    case PartitionConstraint::Kind::none:
      return true;
    case PartitionConstraint::Kind::low_energy:
      return H_x <= -constraint.d * N;
    case PartitionConstraint::Kind::high_energy:
      return H_x >= -constraint.d * N;
  }
  return false;
}

// Streaming log sum of exp(-beta H(x)) over states accepted by `accept`.
template <typename Accept>
LogPartition log_sum_over(const RemInstance& instance, Accept&& accept) {
  const double beta = instance.beta;
  LogPartition out;
  double m = -kInf;
  for (Eigen::Index x = 0; x < instance.H.size(); ++x) {
    if (!accept(static_cast<std::uint32_t>(x))) continue;
    ++out.count;
    m = std::max(m, -beta * instance.H[x]);
  }
  if (out.count == 0) return out;
  out.empty = false;
  long double s = 0.0L;
  for (Eigen::Index x = 0; x < instance.H.size(); ++x) {
    if (!accept(static_cast<std::uint32_t>(x))) continue;
    s += std::exp(static_cast<long double>(-beta * instance.H[x] - m));
  }
  out.log_value = m + static_cast<double>(std::log(s));
  return out;
}

}  // namespace

RemInstance sample_instance(int N, double beta, std::uint64_t seed) {
  if (N < 1 || N > kMaxSampleSites) {
    throw NonPositiveInput("sample_instance: need 1 <= N <= " +
                           std::to_string(kMaxSampleSites) + ", got " +
                           std::to_string(N));
  }
  if (beta < 0.0) {
    throw NonPositiveInput("sample_instance: need beta >= 0, got " +
                           std::to_string(beta));
  }
  RemInstance instance;
  instance.N = N;
  instance.beta = beta;
  instance.seed = seed;
  const Eigen::Index n_states = Eigen::Index(1) << N;
  instance.H.resize(n_states);
  GaussianStream gauss(seeded_engine(seed, /*stream_id=*/0));
  const double scale = std::sqrt(static_cast<double>(N));
  for (Eigen::Index x = 0; x < n_states; ++x) {
    instance.H[x] = scale * gauss.next();
  }
  Fnv1a64 digest;
  digest.update(static_cast<std::int64_t>(N));
  digest.update(beta);
  digest.update(seed);
  for (Eigen::Index x = 0; x < n_states; ++x) digest.update(instance.H[x]);
  instance.content_digest = digest.digest();
  return instance;
}

ProbabilityVector gibbs_measure(const RemInstance& instance) {
  check_instance(instance, "gibbs_measure");
  const LogPartition z = log_sum_over(instance, [](std::uint32_t) { return true; });
  Eigen::VectorXd p(instance.H.size());
  Eigen::Index argmax = 0;
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    p[x] = std::exp(-instance.beta * instance.H[x] - z.log_value);
    if (p[x] > p[argmax]) argmax = x;
  }
  // Absorb the accumulated rounding of 2^N exponentials into the largest
  // entry so the vector sums to 1 at validation precision.
  p[argmax] -= p.sum() - 1.0;
  return ProbabilityVector(std::move(p));
}

ReversibleChain metropolis_chain(const RemInstance& instance) {
  check_instance(instance, "metropolis_chain");
  const int N = instance.N;
  if (N > kMaxChainSites) {
    throw CapExceeded("metropolis_chain: N = " + std::to_string(N) +
                      " exceeds the cap " + std::to_string(kMaxChainSites) +
                      " (2^N-state chain would be too large downstream)");
  }
  const std::uint32_t n_states = 1u << N;
  const double base_rate = 1.0 / N;
  std::vector<EdgeSpec> edges;
  edges.reserve(static_cast<std::size_t>(N) * (n_states / 2));
  for (std::uint32_t x = 0; x < n_states; ++x) {
    for (int i = 0; i < N; ++i) {
      const std::uint32_t y = x ^ (1u << i);
      if (y < x) continue;
      const double dH = instance.H[y] - instance.H[x];
      EdgeSpec e;
      e.x = static_cast<int>(x);
      e.y = static_cast<int>(y);
      e.rate_xy = base_rate * std::exp(-instance.beta * std::max(dH, 0.0));
      e.rate_yx = base_rate * std::exp(-instance.beta * std::max(-dH, 0.0));
      edges.push_back(e);
    }
  }
  return build_chain(static_cast<int>(n_states), edges,
                     gibbs_measure(instance).vec());
}

// -----------------------------------------------------------------------------
// partition functions
// -----------------------------------------------------------------------------

LogPartition log_partition(const RemInstance& instance,
                           const PartitionConstraint& constraint) {
  check_instance(instance, "log_partition");
  const int N = instance.N;
  return log_sum_over(instance, [&](std::uint32_t x) {
    return constraint_accepts(constraint, instance.H[x], N);
  });
}

LogPartition subcube_partition(const RemInstance& instance,
                               std::uint32_t fixed_mask,
                               std::uint32_t fixed_values,
                               const PartitionConstraint& constraint) {
  check_instance(instance, "subcube_partition");
  const int N = instance.N;
  const std::uint32_t full = (N == 32) ? ~0u : ((1u << N) - 1u);
  if ((fixed_mask & ~full) != 0u || (fixed_values & ~fixed_mask) != 0u) {
    throw NonPositiveInput(
        "subcube_partition: fixed_values must be a subset of fixed_mask, and "
        "the mask must fit in N bits");
  }
  return log_sum_over(instance, [&](std::uint32_t x) {
    return (x & fixed_mask) == fixed_values &&
           constraint_accepts(constraint, instance.H[x], N);
  });
}

// -----------------------------------------------------------------------------
// flat-weight assignment for the trap set
// -----------------------------------------------------------------------------

LambdaWeightsReport lambda_weights(const RemInstance& instance, double d,
                                   double rho) {
  check_instance(instance, "lambda_weights");
  if (!(d > 0.0) || !(rho > 0.0)) {
    throw NonPositiveInput("lambda_weights: need d > 0 and rho > 0");
  }
  LambdaWeightsReport report;
  report.d = d;
  report.rho = rho;
  PartitionConstraint low;
  low.kind = PartitionConstraint::Kind::low_energy;
  low.d = d;
  const LogPartition z_low = log_partition(instance, low);
  report.log_z_low = z_low.log_value;

  const Eigen::Index n_states = instance.H.size();
  const double threshold = -d * instance.N;
  report.lambda = Eigen::VectorXd::Ones(n_states);
  report.mu = Eigen::VectorXd::Ones(n_states);
  for (Eigen::Index x = 0; x < n_states; ++x) {
    if (instance.H[x] < threshold) {  // boundary states keep lambda = 1
      report.lambda[x] = std::exp(rho * z_low.log_value);
      ++report.low_count;
    }
  }
  report.empty_low_set = report.low_count == 0;
  return report;
}

// -----------------------------------------------------------------------------
// occupation profile
// -----------------------------------------------------------------------------

namespace {

// M = sqrt(N / log2(N c_u)) with c_u = (2 log 2 + c) / c1.
double interval_scale(int N, double c, double c1, const char* who) {
  if (!(c1 > 0.0)) {
    throw NonPositiveInput(std::string(who) + ": need c1 > 0");
  }
  const double c_u = (2.0 * std::log(2.0) + c) / c1;
  if (!(c_u > 0.0) || !(N * c_u > 1.0)) {
    throw NonPositiveInput(std::string(who) +
                           ": need N (2 log 2 + c)/c1 > 1 for the interval "
                           "scale to be defined");
  }
  return std::sqrt(N / std::log2(N * c_u));
}

}  // namespace

OccupationProfile occupation_profile(const RemInstance& instance, double d,
                                     double c, double c1) {
  check_instance(instance, "occupation_profile");
  if (!(d > 0.0)) throw NonPositiveInput("occupation_profile: need d > 0");
  const int N = instance.N;
  const double beta_c = critical_beta;
  OccupationProfile profile;
  profile.N = N;
  profile.d = d;
  profile.c = c;
  profile.c1 = c1;
  profile.M_scale = interval_scale(N, c, c1, "occupation_profile");
  const double M = profile.M_scale;
  profile.D_index = d * M / beta_c - 1.0;
  profile.total_states = 1LL << N;

  // Interval edges in -H units: beta_c (k+1) N / M, clipped at d N.
  const int last_k = static_cast<int>(std::ceil(d * M / beta_c)) - 1;
  const double dN = d * N;
  std::vector<double> edges;
  for (int k = 0; k <= last_k; ++k) {
    const double nominal = beta_c * (k + 1) * N / M;
    edges.push_back(std::min(nominal, dN));
  }
  edges.back() = dN;  // the truncation point is the final edge by definition

  const double sqrtN = std::sqrt(static_cast<double>(N));
  profile.intervals.resize(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    OccupationInterval& iv = profile.intervals[k];
    iv.lower = (k == 0) ? -kInf : edges[k - 1];
    iv.upper = edges[k];
    iv.truncated = beta_c * (k + 1) * N / M > dN;
    // Gaussian reference mass of the nominal band (beta_c k N/M, upper];
    // -H / sqrt(N) is standard normal.
    const double a = beta_c * k * sqrtN / M;
    const double b = iv.upper / sqrtN;
    iv.p = normal_upper_tail(a) - normal_upper_tail(b);
    iv.p_lower = beta_c * (sqrtN / M) * std::exp2(-((k + 1.0) * (k + 1.0)) * N / (M * M));
    iv.p_upper = beta_c * (sqrtN / M) * std::exp2(-(double(k) * k) * N / (M * M));
    const double alpha = 1.0;  // full cube
    iv.rho = 4.0 * std::exp2(N * std::max((k + 1.0) * (k + 1.0) / (M * M) - alpha, 0.0));
    const double rp = iv.rho * iv.p;
    if (rp >= 1.0) {
      iv.lambda_rate = kInf;
    } else {
      iv.lambda_rate =
          rp * std::log(iv.rho * (1.0 - iv.p) / (1.0 - rp)) -
          std::log(1.0 - iv.p + rp * (1.0 - iv.p) / (1.0 - rp));
    }
  }

  // Bin every state with the shared edge array so the counts partition the
  // cube exactly.
  for (Eigen::Index x = 0; x < instance.H.size(); ++x) {
    const double v = -instance.H[x];
    if (v > dN) {
      ++profile.overflow_count;
      continue;
    }
    std::size_t k = 0;
    while (v > edges[k]) ++k;
    ++profile.intervals[k].count;
  }
  long long covered = profile.overflow_count;
  for (OccupationInterval& iv : profile.intervals) {
    covered += iv.count;
    iv.exceeds = static_cast<double>(iv.count) >
                 iv.rho * static_cast<double>(profile.total_states) * iv.p;
  }
  profile.sum_rule_ok = covered == profile.total_states;
  return profile;
}

// -----------------------------------------------------------------------------
// static consistency checks
// -----------------------------------------------------------------------------

StaticBoundsReport static_bounds_check(const RemInstance& instance, double d,
                                       double c, double c1, double rho,
                                       double p,
                                       const std::vector<double>& alphas) {
  check_instance(instance, "static_bounds_check");
  if (!(instance.beta > 0.0)) {
    throw NonPositiveInput("static_bounds_check: need beta > 0");
  }
  if (!(d > 0.0)) throw NonPositiveInput("static_bounds_check: need d > 0");
  const int N = instance.N;
  const double beta = instance.beta;
  const double beta_c = critical_beta;

  StaticBoundsReport report;
  report.beta = beta;
  report.beta_c = beta_c;
  report.d = d;
  report.c = c;
  report.c1 = c1;
  report.zeta = d / beta - 1.0;
  if (rho < 0.0) rho = 0.75;
  if (p < 0.0) {
    const double r =
        (2.0 / 3.0) * (beta * beta / (beta_c * beta_c + beta * beta)) *
        report.zeta * report.zeta;
    p = r / (1.0 + r);
  }
  if (!(rho > 0.0) || !(p > 0.0) || !(p < 1.0)) {
    throw NonPositiveInput("static_bounds_check: need rho > 0 and 0 < p < 1");
  }
  report.rho = rho;
  report.p = p;

  const double logN = std::log(static_cast<double>(N));
  const double sqrt_term = beta * beta_c * std::sqrt(c1 * (1.0 + c) * N * logN);

  report.log_z = log_partition(instance).log_value;
  report.log_z_lower_ref =
      -sqrt_term + N * (beta * beta / 2.0 + beta_c * beta_c / 2.0);
  report.z_lower_holds = report.log_z >= report.log_z_lower_ref;

  PartitionConstraint low;
  low.kind = PartitionConstraint::Kind::low_energy;
  low.d = d;
  const LogPartition z_low = log_partition(instance, low);
  report.log_z_low = z_low.log_value;
  report.empty_low_set = z_low.empty;
  report.log_z_low_upper_ref =
      sqrt_term + N * (beta * d - d * d / 2.0 + beta_c * beta_c / 2.0);
  report.z_low_upper_holds =
      z_low.empty || report.log_z_low <= report.log_z_low_upper_ref;

  report.zeta_in_range =
      report.zeta > 0.0 && report.zeta < (beta_c - beta) / beta;
  report.zeta_sq_floor =
      12.0 * (beta_c / beta) * std::sqrt(c1 * (1.0 + c) * logN / N);
  report.zeta_meets_floor = report.zeta * report.zeta >= report.zeta_sq_floor;

  report.statics_lhs = p * rho / (report.zeta * report.zeta * (1.0 - p));
  report.statics_rhs = 0.5 * beta * beta / (beta * beta + beta_c * beta_c);
  report.statics_holds =
      report.statics_lhs <= report.statics_rhs * (1.0 + 1e-12);

  const LambdaWeightsReport weights = lambda_weights(instance, d, rho);
  const ProbabilityVector pi = gibbs_measure(instance);
  const double expo = p / (1.0 - p);
  long double r_sum = 0.0L;
  for (Eigen::Index x = 0; x < instance.H.size(); ++x) {
    r_sum += static_cast<long double>(pi[static_cast<int>(x)]) *
             std::pow(static_cast<long double>(weights.lambda[x]),
                      static_cast<long double>(expo));
  }
  report.R = static_cast<double>(r_sum);
  report.R_ok = report.R <= 2.0;

  const double M = interval_scale(N, c, c1, "static_bounds_check");
  for (double alpha : alphas) {
    SubcubeCheck check;
    check.alpha = alpha;
    check.free_coords = static_cast<int>(std::llround(alpha * N));
    if (check.free_coords < 1 || check.free_coords > N - 1 ||
        !(alpha * M * M > 1.0)) {
      report.subcube_checks.push_back(check);
      continue;
    }
    check.applicable = true;
    check.A = std::sqrt(alpha * M * M - 1.0);
    const double a_mid = (beta / beta_c) * M;
    const double a_high = (d / beta_c) * M;
    double log_zcal;
    if (check.A < a_mid) {
      check.regime = 0;
      log_zcal = beta * d * N;
    } else if (check.A < a_high) {
      check.regime = 1;
      log_zcal = log_add_exp(
          beta * d * N,
          N * (beta * beta / 2.0 + alpha * beta_c * beta_c / 2.0));
    } else {
      check.regime = 2;
      log_zcal = N * (beta * beta / 2.0 + alpha * beta_c * beta_c / 2.0);
    }
    const int j = check.free_coords + 1;
    check.log_bound = 0.5 * logN + beta * beta_c * N / M +
                      log_add_exp(j * std::log(2.0), log_zcal);

    const std::uint32_t free_mask = (1u << check.free_coords) - 1u;
    const std::uint32_t fixed_mask = ((1u << N) - 1u) & ~free_mask;
    const int n_clamped = N - check.free_coords;
    PartitionConstraint high;
    high.kind = PartitionConstraint::Kind::high_energy;
    high.d = d;
    double log_sup = -kInf;
    for (std::uint32_t v = 0; v < (1u << n_clamped); ++v) {
      const LogPartition sub = subcube_partition(
          instance, fixed_mask, v << check.free_coords, high);
      log_sup = std::max(log_sup, sub.log_value);
    }
    check.log_sup = log_sup;
    check.holds = log_sup <= check.log_bound;
    report.subcube_checks.push_back(check);
  }
  return report;
}

// -----------------------------------------------------------------------------
// gap sweep
// -----------------------------------------------------------------------------

GapSweepReport rem_gap_sweep(const std::vector<int>& N_list, double beta,
                             int num_seeds, std::uint64_t base_seed) {
  if (N_list.empty()) throw NonPositiveInput("rem_gap_sweep: empty N_list");
  if (num_seeds < 1) throw NonPositiveInput("rem_gap_sweep: need num_seeds >= 1");
  GapSweepReport report;
  report.beta = beta;
  report.target_rate = beta * critical_beta;
  report.num_seeds = num_seeds;
  report.N_list = N_list;
  report.gaps.resize(N_list.size());
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    const int N = N_list[i];
    if (N < 2 || N > kMaxChainSites) {
      throw NonPositiveInput("rem_gap_sweep: N = " + std::to_string(N) +
                             " outside [2, " + std::to_string(kMaxChainSites) +
                             "]");
    }
    std::vector<double> rates;
    rates.reserve(num_seeds);
    for (int s = 0; s < num_seeds; ++s) {
      Fnv1a64 mix;
      mix.update(base_seed);
      mix.update(static_cast<std::int64_t>(N));
      mix.update(static_cast<std::int64_t>(s));
      const RemInstance instance = sample_instance(N, beta, mix.digest());
      const ReversibleChain chain = metropolis_chain(instance);
      const double gap = spectral_gap(chain).gap;
      report.gaps[i].push_back(gap);
      rates.push_back(-std::log(gap) / N);
    }
    report.median_rates.push_back(median(rates));
    report.deviations.push_back(
        std::abs(report.median_rates.back() - report.target_rate));
  }
  std::size_t i_min = 0;
  std::size_t i_max = 0;
  for (std::size_t i = 1; i < N_list.size(); ++i) {
    if (N_list[i] < N_list[i_min]) i_min = i;
    if (N_list[i] > N_list[i_max]) i_max = i;
  }
  double fitted = 0.0;
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    const double scale =
        beta * std::sqrt(std::log(static_cast<double>(N_list[i])) / N_list[i]);
    if (scale > 0.0) fitted = std::max(fitted, report.deviations[i] / scale);
  }
  report.fitted_c = fitted;
  report.moved_away =
      N_list.size() > 1 && report.deviations[i_max] > report.deviations[i_min];
  return report;
}

}  // namespace mixbound
