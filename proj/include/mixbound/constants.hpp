#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "mixbound/chain.hpp"
#include "mixbound/spectral.hpp"

namespace mixbound {

// Functional constants defined as infima over centered test functions
// (pi(f) = 0) of a Dirichlet-energy ratio:
//
//   L(p)      = inf E(f,f) ||f||_inf^{(2-2p)/p} / pi(|f|)^{2/p},   p in (0,1]
//   L_eta(p)  = inf E(f,f) ||f||_inf^{(2-2p)/p} / eta(|f|)^{2/p},  p in (0,1]
//   K(p)      = inf E(f,f) ||f||_inf^{(4-2p)/p} / pi(f^2)^{2/p},   p in (0,2)
//   Lambda(p) = inf E(f,f) / pi(|f|^p)^{2/p},                      p in (0,2]
//   K2(p)     = inf E(f,f) pi(f^2)^{(1-p)/(2p)} / pi(|f|)^{(p+1)/p}, p in (0,1]
//
// Every ratio is homogeneous of degree 0 in f.  Lambda(2) equals the spectral
// gap; Lambda(1) = L(1); each family except L_eta is >= the gap (for L_eta
// only the crude bound gap * min_pi is available).
enum class ConstantFamily { L, L_eta, K, Lambda, K2 };

const char* family_name(ConstantFamily family);

// The family's defining ratio at one centered witness f; an upper bound on
// the infimum.  eta is required for L_eta and ignored otherwise.
// Throws NotCentered if |pi(f)| > 1e-10 * max(1, ||f||_inf), ZeroDenominator
// if the denominator vanishes, NonPositiveInput for p outside the family
// range.
double constant_ratio(const ReversibleChain& chain, ConstantFamily family,
                      double p, const Eigen::VectorXd& f,
                      const ProbabilityVector* eta = nullptr);

struct FunctionalConstantEstimate {
  ConstantFamily family = ConstantFamily::L;
  double p = 0.0;
  double upper_bound = 0.0;               // best witness ratio found
  std::optional<double> lower_bound;      // certified spectral lower bound
  Eigen::VectorXd witness;                // minimizing test function found
  double gap = 0.0;                       // spectral gap used for lower_bound
};

struct MinimizeBudget {
  int multistarts = 8;
  int max_passes = 30;
  std::uint64_t seed = 20240801ull;
  bool include_eigenvector_start = true;
  SpectralOptions spectral;
};

// Multistart projected coordinate descent on the ratio (recentered to
// pi(f) = 0 and renormalized to ||f||_inf = 1 at every evaluation).
// Deterministic given the budget seed.  Witnesses with vanishing denominator
// count as +inf and are skipped.
FunctionalConstantEstimate minimize_constant(const ReversibleChain& chain,
                                             ConstantFamily family, double p,
                                             const ProbabilityVector* eta = nullptr,
                                             const MinimizeBudget& budget = {});

// ---------------------------------------------------------------------------
// closed-form decay / mixing-time bounds driven by the constants
// ---------------------------------------------------------------------------

// d_eta(t) <= C_{p,p'} L_eta(p')^{-p'/2} L(p)^{-p p'/(4-2p)} t^{-p'/(2-p)}
// with C_{p,p'} = e^{-p'/2} (p/(2-p))^{p p'/(4-2p)}.  Decreasing in both
// constants, so certified lower bounds may be substituted.
double decay_bound(double L_eta_lower, double L_lower, double p,
                   double p_prime, double t);

// T_eta(eps) <= C~_p L_eta(p')^{-(2-p)/2} L(p)^{-p/2} eps^{-(2-p)/p'} with
// C~_p = e^{-(2-p)/2} (p/(2-p))^{p/2}; equals the t that solves
// decay_bound(t) = eps.
double mixing_time_bound(double L_eta_lower, double L_lower, double p,
                         double p_prime, double epsilon);

// log of mixing_time_bound from log-domain inputs (log(1/L_eta(p')),
// log(1/L(p)), log(1/eps)); safe when the bound itself overflows.
double log_mixing_time_bound(double log_inv_L_eta, double log_inv_L, double p,
                             double p_prime, double log_inv_epsilon);

// pi[(P_t f - pi f)^2] <= e^{-2 gap t} pi(f^2) for centered f.
double variance_decay_bound(double gap, double t, double pi_f_squared);

// max_x 2 d_TV(P_t(x,.), pi) <= 2 sqrt(1/min_pi) e^{-gap t}; this returns
// the TV bound sqrt(1/min_pi) e^{-gap t}.
double worst_case_tv_bound(double gap, double min_pi, double t);

// pi[(P_t f)^2] <= ((4-2p)/p)^{-p/(2-p)} (K_lower t)^{-p/(2-p)} ||f||_inf^2
// for centered f, p in (0,2).
double k_variance_decay_bound(double K_lower, double p, double t,
                              double f_inf_norm);

// ---------------------------------------------------------------------------
// eigenvector concentration diagnostic
// ---------------------------------------------------------------------------

// First nontrivial eigenpair (l, phi) with pi(phi^2) = 1.  The K2 ratio at
// phi collapses to l / pi(|phi|)^{(p+1)/p}, which is by definition an upper
// bound on K2(p); pi(|phi|) <= 1 by Cauchy-Schwarz.  l / L(p)-based numbers
// are diagnostics only (the sharp comparison constant is not explicit).
struct ConcentrationReport {
  double p = 0.0;
  double p_prime = 0.0;
  double eigenvalue = 0.0;       // l = E(phi, phi)
  double pi_abs_phi = 0.0;       // pi(|phi|)
  double k2_ratio_at_phi = 0.0;  // l / pi(|phi|)^{(p+1)/p}
  double l_over_L_upper = 0.0;   // l / (best L(p) witness ratio); diagnostic
  bool cauchy_schwarz_ok = false;  // pi(|phi|) <= 1 within 1e-12
};

ConcentrationReport eigenvector_concentration(const ReversibleChain& chain,
                                              double p, double p_prime,
                                              const SpectralOptions& opts = {});

}  // namespace mixbound
