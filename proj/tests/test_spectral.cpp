#include <cmath>
#include <vector>

#include <doctest.h>

#include "mixbound/chain.hpp"
#include "mixbound/spectral.hpp"
#include "mixbound/util.hpp"
#include "oracles.hpp"

using namespace mixbound;

namespace {

// Complete graph on n states: uniform stationary law, every pair linked at
// rate 1/(n-1).  The gap is n/(n-1) exactly.
ReversibleChain complete_graph(int n) {
  std::vector<EdgeSpec> edges;
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      EdgeSpec e;
      e.x = x;
      e.y = y;
      e.rate_xy = 1.0 / (n - 1);
      e.rate_yx = 1.0 / (n - 1);
      edges.push_back(e);
    }
  }
  return build_chain(n, edges, Eigen::VectorXd::Constant(n, 1.0 / n));
}

// Simple random walk on the N-dimensional hypercube (rate 1/N per site).
// Eigenvalues are 2k/N, so the gap is 2/N exactly.
ReversibleChain hypercube_walk(int N) {
  const int n = 1 << N;
  std::vector<EdgeSpec> edges;
  for (int x = 0; x < n; ++x) {
    for (int i = 0; i < N; ++i) {
      const int y = x ^ (1 << i);
      if (y < x) continue;
      EdgeSpec e;
      e.x = x;
      e.y = y;
      e.rate_xy = 1.0 / N;
      e.rate_yx = 1.0 / N;
      edges.push_back(e);
    }
  }
  return build_chain(n, edges, Eigen::VectorXd::Constant(n, 1.0 / n));
}

}  // namespace

TEST_CASE("two-state gap equals the sum of the rates") {
  EdgeSpec e;
  e.x = 0;
  e.y = 1;
  e.rate_xy = 0.75;  // a
  e.rate_yx = 0.25;  // b; pi = (b, a)/(a+b)
  const ReversibleChain chain = build_chain(2, {e}, Eigen::Vector2d(0.25, 0.75));
  CHECK(spectral_gap(chain).gap == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("complete graph gap is n/(n-1)") {
  for (int n : {3, 5, 8}) {
    const ReversibleChain chain = complete_graph(n);
    CHECK(spectral_gap(chain).gap ==
          doctest::Approx(double(n) / (n - 1)).epsilon(1e-12));
  }
}

TEST_CASE("hypercube walk gap is 2/N") {
  for (int N : {2, 3, 4}) {
    const ReversibleChain chain = hypercube_walk(N);
    CHECK(spectral_gap(chain).gap ==
          doctest::Approx(2.0 / N).epsilon(1e-12));
  }
}

TEST_CASE("dense solver agrees with the symmetrized dense oracle") {
  auto rng = seeded_engine(31337, 0);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 30);
    const ReversibleChain chain = oracle::random_chain(n, rng);
    const SpectralResult result = spectral_gap(chain);
    CHECK(result.method == "dense");
    CHECK(result.gap ==
          doctest::Approx(oracle::gap_direct(chain)).epsilon(1e-10));
  }
}

TEST_CASE("iterative path agrees with the dense path") {
  auto rng = seeded_engine(777, 0);
  const ReversibleChain chain = oracle::random_chain(96, rng, 0.1);
  SpectralOptions dense;
  SpectralOptions iterative;
  iterative.dense_cutoff = 8;  // force the Cholesky-Lanczos route
  const SpectralResult a = spectral_gap(chain, dense);
  const SpectralResult b = spectral_gap(chain, iterative);
  CHECK(a.method == "dense");
  CHECK(b.method == "cholesky_lanczos");
  CHECK(b.gap == doctest::Approx(a.gap).epsilon(1e-9));
}

TEST_CASE("the returned eigenvector witnesses the gap in the Rayleigh sense") {
  auto rng = seeded_engine(555, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 12);
    const ReversibleChain chain = oracle::random_chain(n, rng);
    SpectralOptions opts;
    opts.want_eigenvector = true;
    const SpectralResult result = spectral_gap(chain, opts);
    REQUIRE(result.phi.size() == n);
    CHECK(result.phi.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    const double mean = chain.pi().dot(result.phi);
    CHECK(std::abs(mean) < 1e-9);
    const double var =
        result.phi.cwiseAbs2().dot(chain.pi()) - mean * mean;
    const double rayleigh = dirichlet_form(chain, result.phi, result.phi) / var;
    CHECK(rayleigh == doctest::Approx(result.gap).epsilon(1e-8));
    CHECK(result.constant_overlap < 1e-8);
    CHECK(result.lambda2 >= result.gap - 1e-12);
  }
}
