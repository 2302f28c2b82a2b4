#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "mixbound/chain.hpp"

namespace mixbound {

struct SpectralOptions {
  // Chains up to this size use the dense symmetric eigensolver; larger ones
  // use Cholesky-preconditioned Lanczos with deflation of the stationary
  // direction.
  int dense_cutoff = 1200;
  double tol = 1e-12;       // relative Ritz-residual target (Lanczos path)
  int max_iter = 400;       // Lanczos iteration cap
  std::uint64_t seed = 12345;  // start-vector seed (Lanczos path)
  bool want_eigenvector = true;
};

struct SpectralResult {
  double gap = 0.0;      // smallest nonzero eigenvalue of -generator
  double lambda2 = 0.0;  // next eigenvalue above the gap (diagnostic)
  // Eigenvector phi of the generator at -gap (original, non-symmetrized
  // coordinates), normalized so max|phi| = 1; pi(phi) = 0 up to roundoff.
  Eigen::VectorXd phi;
  double residual = 0.0;         // ||A v - gap v||_2 in symmetrized coordinates
  double constant_overlap = 0.0; // |<v, sqrt(pi)>|, should be ~0
  std::string method;            // "dense" or "cholesky_lanczos"
};

// Spectral gap of the chain: the smallest nonzero eigenvalue of minus the
// generator, computed on the symmetrized matrix A(x,y) = Q(e)/sqrt(pi x pi y).
// Throws EigensolverFailure if neither path converges.
SpectralResult spectral_gap(const ReversibleChain& chain,
                            const SpectralOptions& opts = {});

// Dense symmetrized negative generator (-A is PSD with kernel sqrt(pi)).
Eigen::MatrixXd symmetrized_generator(const ReversibleChain& chain);

}  // namespace mixbound
