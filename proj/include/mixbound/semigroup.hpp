#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mixbound/chain.hpp"

namespace mixbound {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct UniformizationReport {
  double rate = 0.0;        // uniformization rate Lambda
  int terms = 0;            // Poisson terms used
  double tail_bound = 0.0;  // certified bound on the truncated tail mass
};

// P_t f via uniformization: P_t = sum_k Poisson_{Lambda t}(k) W^k with
// W = I + G/Lambda row-stochastic.  The Poisson series is truncated with a
// certified geometric tail bound below tail_tol.
Eigen::VectorXd semigroup_apply(const ReversibleChain& chain,
                                const Eigen::VectorXd& f, double t,
                                double tail_tol = 1e-12,
                                UniformizationReport* report = nullptr);

// Law of X_t when X_0 ~ mu (row-vector evolution mu P_t).
Eigen::VectorXd distribution_at(const ReversibleChain& chain,
                                const ProbabilityVector& mu, double t,
                                double tail_tol = 1e-12);

// Dense row-stochastic transition matrix P_t.
RowMatrix transition_matrix(const ReversibleChain& chain, double t,
                            double tail_tol = 1e-12,
                            UniformizationReport* report = nullptr);

// Total variation distance (1/2) ||p - q||_1.
double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// ---------------------------------------------------------------------------
// distance-to-equilibrium envelopes
// ---------------------------------------------------------------------------

// Certified bracket for the eta-averaged distance
//   m(t) = sup_{||f||_inf <= 1} sum_y eta(y) |P_t f(y) - pi(f)|,
// which is non-increasing in t (P_{t+s} f = P_t(P_s f) and {P_s f} stays in
// the unit ball), so a grid point with upper(t) <= eps certifies that the
// distance stays <= eps for all later times as well.
//
//   lower[i]: m evaluated at an explicit f (sign vector of the signed
//             deviation eta P_t - pi, optionally improved by coordinate
//             ascent) -- a certified lower bound;
//   upper[i]: sum_y eta(y) * 2 d_TV(P_t(y,.), pi) -- a certified upper bound
//             (per-row optimal f); equality holds when eta is a point mass;
//   running_sup_upper[i]: max of upper over grid indices >= i.
struct DecayEnvelope {
  std::vector<double> time_grid;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> running_sup_upper;
  double max_row_sum_error = 0.0;  // max |row sum - 1| seen in P_t
};

struct EnvelopeOptions {
  int local_search_passes = 2;  // coordinate-ascent passes on the lower bound
  double tail_tol = 1e-12;
};

// Envelope on an explicit time grid (ascending, nonnegative; EmptyGrid if
// empty).  Cost: one dense transition matrix per grid point.
DecayEnvelope d_eta_envelope(const ReversibleChain& chain,
                             const ProbabilityVector& eta,
                             const std::vector<double>& grid,
                             const EnvelopeOptions& opts = {});

// Envelope on the doubling grid {t0 * 2^k : k = 0..}: the transition matrix
// is computed once at t0 by uniformization and then squared repeatedly in the
// probability domain (row-stochastic products keep roundoff additive).  Used
// for large chains / long horizons where per-point uniformization is too
// slow.  If stop_epsilon > 0, the ladder stops stop_after rungs after upper
// first drops below stop_epsilon/2 (the envelope quantity is non-increasing,
// so the bracket derived from the computed rungs stays certified).
struct LadderOptions {
  double t0 = 4.0;
  int max_rungs = 18;
  double stop_epsilon = 0.0;
  int stop_after = 2;
  double tail_tol = 1e-12;
  int local_search_passes = 1;
};
DecayEnvelope d_eta_envelope_ladder(const ReversibleChain& chain,
                                    const ProbabilityVector& eta,
                                    const LadderOptions& opts = {});

// ---------------------------------------------------------------------------
// epsilon-crossing times
// ---------------------------------------------------------------------------

struct TEtaBracket {
  double t_lo = 0.0;  // certified: distance > eps at this time (0 if none)
  double t_hi = 0.0;  // certified: distance <= eps from this time on
  DecayEnvelope envelope;
};

struct TEtaOptions {
  double t_min = 1e-3;
  double t_max = 1e9;
  double grid_ratio = 2.0;  // geometric grid factor
  double rel_tol = 0.05;    // stop refining when t_hi/t_lo - 1 <= rel_tol
  int max_refine = 60;
  EnvelopeOptions env;
};

// Certified bracket [t_lo, t_hi] for the eps-crossing time of m(t) (the
// eta-averaged distance above).  Grid caveat: t_lo comes from lower-bound
// evaluations at finitely many times, so the true crossing may exceed it by
// up to the local grid spacing.  Throws NotReachedWithinHorizon if upper
// never drops to eps by t_max, EmptyGrid if the grid would be empty.
TEtaBracket t_eta(const ReversibleChain& chain, const ProbabilityVector& eta,
                  double epsilon, const TEtaOptions& opts = {});

// Bracket extraction from an already-computed envelope: t_hi = first grid
// time with running_sup_upper <= eps, t_lo = last grid time with lower > eps.
// reached=false when no grid time certifies the crossing.
struct EnvelopeBracket {
  double t_lo = 0.0;
  double t_hi = 0.0;
  bool reached = false;
};
EnvelopeBracket bracket_from_envelope(const DecayEnvelope& env, double epsilon);

}  // namespace mixbound
