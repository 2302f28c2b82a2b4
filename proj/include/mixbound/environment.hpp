#pragma once
// The landscape as seen from the particle.  The hypercube acts on itself by
// XOR; a group element g acts on a landscape H by (g.H)(x) = H(x ^ g), and the
// environment viewed from a walker at X_t is the shifted landscape X_t.H.
// Evaluation functionals phi_a(h) = h(a) separate landscapes, so all checks
// compare expectations of finitely many phi_a (and products of two of them).

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mixbound/rem.hpp"
#include "mixbound/util.hpp"

namespace mixbound {

// (sigma.H)(x) = H(x ^ sigma).
Eigen::VectorXd act(std::uint32_t sigma, const Eigen::VectorXd& H);

// -----------------------------------------------------------------------------
// pushforward law of the environment under a Gibbs start
// -----------------------------------------------------------------------------

// nu = sum_sigma pi(sigma) delta_{sigma.H}.  Atoms that coincide as vectors
// (possible for degenerate landscapes) are merged by exact equality: shifts
// are bucketed by a content hash and verified entrywise before merging.
struct EnvironmentLaw {
  std::vector<std::uint32_t> representatives;  // one group element per atom
  std::vector<double> weights;                 // Gibbs mass carried by the atom
  long long merged = 0;                        // elements absorbed into earlier atoms
  std::uint64_t base_digest = 0;               // digest of the generating instance
};

EnvironmentLaw nu_measure(const RemInstance& instance);

// -----------------------------------------------------------------------------
// distributional identities
// -----------------------------------------------------------------------------

// Starting the walk at sigma in landscape H and watching the environment is
// the same as starting at 0 in the shifted landscape sigma.H.  Checked on all
// one-time marginals E[phi_a] at time t and all two-time correlations
// E[phi_a(env_{t/2}) phi_b(env_t)], computed through independently built
// chains on both sides.
struct ShiftLemmaReport {
  std::uint32_t sigma = 0;
  double t = 0.0;
  double max_one_time_error = 0.0;
  double max_two_time_error = 0.0;
  double scale = 1.0;  // magnitude reference for the tolerance
  bool holds = false;
};

ShiftLemmaReport shift_lemma_check(const RemInstance& instance,
                                   std::uint32_t sigma, double t);

// Under a Gibbs start the environment process is stationary and reversible:
//   invariance:  E_nu[phi_a(env_t)] = nu(phi_a) for every a,
//   reversibility: M_ab = E_nu[phi_a(env_0) phi_b(env_t)] is symmetric.
// Both expectations are evaluated by running the translated chain of each
// start point.
struct InvarianceReport {
  double t = 0.0;
  double max_invariance_error = 0.0;
  double max_symmetry_error = 0.0;
  double scale = 1.0;
  bool holds = false;
};

InvarianceReport invariance_reversibility_check(const RemInstance& instance,
                                                double t);

// -----------------------------------------------------------------------------
// start-point independence of smooth statistics
// -----------------------------------------------------------------------------

// For phi(h) = tanh(beta h(0)) — the landscape height under the particle,
// squashed — compare E_sigma[phi(env_t)] across all start points sigma by
// averaging over independent instances.  The check passes when the per-sigma
// confidence intervals share a common point (for intervals on a line,
// pairwise overlap is equivalent to max lower end <= min upper end).
struct SigmaIndependenceReport {
  int N = 0;
  double beta = 0.0;
  double t = 0.0;
  int num_seeds = 0;
  std::vector<double> means;        // per sigma
  std::vector<Interval> intervals;  // normal-approximation confidence intervals
  double max_lo = 0.0;
  double min_hi = 0.0;
  bool all_overlap = false;
};

SigmaIndependenceReport sigma_independence_check(int N, double beta, double t,
                                                 int num_seeds,
                                                 std::uint64_t base_seed = 1);

// -----------------------------------------------------------------------------
// averaged mixing time under the uniform start
// -----------------------------------------------------------------------------

// Certified envelope upper times at level epsilon for the uniform start,
// averaged over independent instances.  Seeds whose envelope never certifies
// the level on the supplied grid are excluded and counted.
struct TAvReport {
  int N = 0;
  double beta = 0.0;
  double epsilon = 0.0;
  int num_seeds = 0;
  std::vector<double> upper_times;  // per seed; NaN when the grid never certified
  int reached_count = 0;
  double mean = 0.0;
  Interval ci{0.0, 0.0};
  bool insufficient_seeds = true;  // fewer than 30 contributing seeds
};

TAvReport t_av_estimate(int N, double beta, double epsilon, int num_seeds,
                        const std::vector<double>& time_grid,
                        std::uint64_t base_seed = 1);

}  // namespace mixbound
