#pragma once
// Random-energy-model instances on the N-site hypercube and the static
// estimates used by the mixing-time analysis.
//
// An instance assigns i.i.d. Gaussian energies H(x) ~ N(0, N) to the 2^N
// states.  The Gibbs measure is pi(x) = exp(-beta H(x)) / Z and the dynamics
// is Metropolis: rate (1/N) exp(-beta (H(y) - H(x))_+) across each Hamming-1
// edge, so the edge conductance has the closed form
//     Q(x, y) = exp(-beta max(H(x), H(y))) / (N Z).
// Deep traps are states with very negative H; barriers are states with large
// positive H.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mixbound/chain.hpp"

namespace mixbound {

// sqrt(2 log 2), the inverse temperature where the ground-state energy scale
// -min_x H(x) / N converges to beta_c and the spectral-gap exponent saturates.
inline const double critical_beta = std::sqrt(2.0 * std::log(2.0));

struct RemInstance {
  int N = 0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  Eigen::VectorXd H;               // 2^N energies
  std::uint64_t content_digest = 0;  // FNV-1a over (N, beta, seed, H)
};

// Draws the 2^N energies from the dedicated Gaussian stream of `seed`.
// N is capped at 24 (the energy table alone is 2^N doubles).
RemInstance sample_instance(int N, double beta, std::uint64_t seed);

// Gibbs measure computed in the log domain (safe for beta H of either sign).
ProbabilityVector gibbs_measure(const RemInstance& instance);

// Metropolis chain on the full hypercube.  Throws CapExceeded for N > 14:
// the chain object stores N 2^N directed rates and downstream dense solvers
// scale as (2^N)^2 or worse.
ReversibleChain metropolis_chain(const RemInstance& instance);

// -----------------------------------------------------------------------------
// partition functions
// -----------------------------------------------------------------------------

struct PartitionConstraint {
  enum class Kind {
    none,         // all states
    low_energy,   // H(x) <= -d N   (trap set)
    high_energy,  // H(x) >= -d N   (complement, boundary included on both)
  };
  Kind kind = Kind::none;
  double d = 0.0;
};

struct LogPartition {
  double log_value = -std::numeric_limits<double>::infinity();
  bool empty = true;       // no state satisfied the constraint
  long long count = 0;     // number of states summed
};

// log sum of exp(-beta H(x)) over the constrained states.
LogPartition log_partition(const RemInstance& instance,
                           const PartitionConstraint& constraint = {});

// Same restricted to the subcube { x : (x & fixed_mask) == fixed_values }.
LogPartition subcube_partition(const RemInstance& instance,
                               std::uint32_t fixed_mask,
                               std::uint32_t fixed_values,
                               const PartitionConstraint& constraint = {});

// -----------------------------------------------------------------------------
// flat-weight assignment for the trap set
// -----------------------------------------------------------------------------

// lambda(x) = 1 on { H >= -d N } and Z(beta, <= -d)^rho on the strict trap
// set { H < -d N }; mu is identically 1.  Down-weighting the traps by a power
// of their own partition mass is what keeps the weighted path sums R below 2.
struct LambdaWeightsReport {
  Eigen::VectorXd lambda;
  Eigen::VectorXd mu;
  bool empty_low_set = true;  // no strict trap state; all lambda are 1
  double log_z_low = -std::numeric_limits<double>::infinity();
  long long low_count = 0;
  double d = 0.0;
  double rho = 0.0;
};

LambdaWeightsReport lambda_weights(const RemInstance& instance, double d,
                                   double rho);

// -----------------------------------------------------------------------------
// occupation profile of the low-energy tail
// -----------------------------------------------------------------------------

// Counts of -H(x) in the intervals
//   D_0 = (-inf, beta_c N / M],  D_k = (beta_c k N / M, beta_c (k+1) N / M],
// truncated at d N, with M = sqrt(N / log2(N c_u)) and c_u = (2 log 2 + c)/c1.
// Each interval carries a Gaussian reference probability p_k (a difference of
// normal CDFs), the tail sandwich
//   beta_c (sqrt(N)/M) 2^{-(k+1)^2 N/M^2} < p_k < beta_c (sqrt(N)/M) 2^{-k^2 N/M^2},
// a multiplicity allowance rho_k = 4 * 2^{N [((k+1)^2/M^2) - alpha]_+} (full
// cube: alpha = 1), and the binomial large-deviation exponent for the event
// that the count exceeds rho_k 2^N p_k.
struct OccupationInterval {
  double lower = 0.0;  // -inf for the first interval
  double upper = 0.0;
  long long count = 0;
  double p = 0.0;
  double p_lower = 0.0;
  double p_upper = 0.0;
  double rho = 0.0;
  double lambda_rate = 0.0;  // +inf when rho p >= 1 (the exceed event is not rare)
  bool exceeds = false;      // count > rho * 2^N * p
  bool truncated = false;    // upper edge clipped to d N
};

struct OccupationProfile {
  int N = 0;
  double d = 0.0;
  double c = 0.0;
  double c1 = 1.0;
  double M_scale = 0.0;  // sqrt(N / log2(N c_u))
  double D_index = 0.0;  // d M / beta_c - 1, the real-valued index of the last edge
  std::vector<OccupationInterval> intervals;
  long long overflow_count = 0;  // #{ x : -H(x) > d N }
  long long total_states = 0;
  bool sum_rule_ok = false;  // interval counts + overflow == 2^N
};

OccupationProfile occupation_profile(const RemInstance& instance, double d,
                                     double c, double c1 = 1.0);

// -----------------------------------------------------------------------------
// static consistency checks
// -----------------------------------------------------------------------------

// Subcube partition check: clamp the top N - j + 1 coordinates, leave
// j - 1 = round(alpha N) free, and compare the sup over clamp assignments of
// the high-energy-restricted partition function against the closed-form
// allowance
//   log bound = (1/2) log N + beta beta_c N / M + log( 2^j + Zcal )
// where Zcal switches regime with A = sqrt(alpha M^2 - 1):
//   A <  (beta/beta_c) M                      : log Zcal = beta d N
//   (beta/beta_c) M <= A < (d/beta_c) M       : log Zcal = logaddexp(beta d N,
//                                                 N(beta^2/2 + alpha beta_c^2/2))
//   otherwise                                 : log Zcal = N(beta^2/2 + alpha beta_c^2/2)
struct SubcubeCheck {
  double alpha = 0.0;
  int free_coords = 0;
  bool applicable = false;  // requires alpha M^2 > 1
  double A = 0.0;
  int regime = -1;
  double log_sup = -std::numeric_limits<double>::infinity();
  double log_bound = 0.0;
  bool holds = true;
};

struct StaticBoundsReport {
  double beta = 0.0;
  double beta_c = 0.0;
  double d = 0.0;
  double zeta = 0.0;  // d = beta (1 + zeta)
  double rho = 0.0;
  double p = 0.0;
  double c = 0.0;
  double c1 = 1.0;

  // Full partition function against its typical-disorder lower reference
  //   log Z >= -beta beta_c sqrt(c1 (1+c) N log N) + N (beta^2/2 + beta_c^2/2).
  double log_z = 0.0;
  double log_z_lower_ref = 0.0;
  bool z_lower_holds = false;

  // Trap partition function against its typical-disorder upper reference
  //   log Z(beta, <= -d) <= beta beta_c sqrt(c1 (1+c) N log N)
  //                         + N (beta d - d^2/2 + beta_c^2/2).
  double log_z_low = -std::numeric_limits<double>::infinity();
  double log_z_low_upper_ref = 0.0;
  bool z_low_upper_holds = true;  // vacuous when the trap set is empty
  bool empty_low_set = true;

  // Parameter-range conditions.
  bool zeta_in_range = false;    // 0 < zeta < (beta_c - beta)/beta
  double zeta_sq_floor = 0.0;    // 12 (beta_c/beta) sqrt(c1 (1+c) log N / N)
  bool zeta_meets_floor = false;
  double statics_lhs = 0.0;      // p rho / (zeta^2 (1 - p))
  double statics_rhs = 0.0;      // (1/2) beta^2 / (beta^2 + beta_c^2)
  bool statics_holds = false;

  // Weighted mass R = sum_x pi(x) lambda(x)^{p/(1-p)}, wanted <= 2.
  double R = 0.0;
  bool R_ok = false;

  std::vector<SubcubeCheck> subcube_checks;
};

// Negative rho or p selects the balanced defaults rho = 3/4 and
// p/(1-p) = (2/3) (beta^2/(beta_c^2 + beta^2)) zeta^2 with zeta = d/beta - 1.
StaticBoundsReport static_bounds_check(const RemInstance& instance, double d,
                                       double c, double c1 = 1.0,
                                       double rho = -1.0, double p = -1.0,
                                       const std::vector<double>& alphas = {0.5});

// -----------------------------------------------------------------------------
// gap sweep across sizes
// -----------------------------------------------------------------------------

// Spectral gaps of fresh instances at each size, summarized by the per-seed
// rates -(1/N) log(gap) whose medians are compared against the limiting
// exponent beta beta_c.
struct GapSweepReport {
  double beta = 0.0;
  double target_rate = 0.0;  // beta * beta_c
  int num_seeds = 0;
  std::vector<int> N_list;
  std::vector<std::vector<double>> gaps;    // [size index][seed]
  std::vector<double> median_rates;         // median over seeds of -(1/N) log gap
  std::vector<double> deviations;           // |median rate - target|
  double fitted_c = 0.0;  // max_N deviation / (beta sqrt(log N / N))
  bool moved_away = false;  // deviation grew from the smallest to the largest N
};

GapSweepReport rem_gap_sweep(const std::vector<int>& N_list, double beta,
                             int num_seeds, std::uint64_t base_seed = 1);

}  // namespace mixbound
