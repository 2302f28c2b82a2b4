#pragma once
// Independent reference implementations used only by tests.  Everything here
// prefers the most direct (not the fastest or most stable) formulation, so
// agreement with the library is meaningful.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "mixbound/chain.hpp"

namespace oracle {

// Dense generator: off-diagonal rates, diagonal minus the row sum.
inline Eigen::MatrixXd generator_matrix(const mixbound::ReversibleChain& chain) {
  const int n = chain.n();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < chain.num_edges(); ++e) {
    const mixbound::EdgeSpec& spec = chain.edge(e);
    A(spec.x, spec.y) += spec.rate_xy;
    A(spec.y, spec.x) += spec.rate_yx;
  }
  for (int x = 0; x < n; ++x) {
    A(x, x) = 0.0;
    A(x, x) = -A.row(x).sum();
  }
  return A;
}

// Heat kernel through the dense matrix exponential.
inline Eigen::MatrixXd transition_matrix_expm(
    const mixbound::ReversibleChain& chain, double t) {
  return (generator_matrix(chain) * t).exp().eval();
}

// Dirichlet form straight from the directed-rate definition:
// (1/2) sum_{x != y} pi(x) K(x,y) (f(x) - f(y)) (g(x) - g(y)).
inline double dirichlet_direct(const mixbound::ReversibleChain& chain,
                               const Eigen::VectorXd& f,
                               const Eigen::VectorXd& g) {
  double sum = 0.0;
  for (int e = 0; e < chain.num_edges(); ++e) {
    const mixbound::EdgeSpec& spec = chain.edge(e);
    const double df = f[spec.x] - f[spec.y];
    const double dg = g[spec.x] - g[spec.y];
    sum += chain.pi()[spec.x] * spec.rate_xy * df * dg;
    sum += chain.pi()[spec.y] * spec.rate_yx * df * dg;
  }
  return sum / 2.0;
}

// Random reversible chain: random stationary law, spanning tree for
// irreducibility, extra edges with the given probability.  Rates come from
// symmetric conductances q_e, so detailed balance is exact by construction.
inline mixbound::ReversibleChain random_chain(int n, std::mt19937_64& rng,
                                              double extra_edge_prob = 0.3) {
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Eigen::VectorXd pi(n);
  for (int i = 0; i < n; ++i) pi[i] = unif(rng);
  pi /= pi.sum();
  int imax = 0;
  pi.maxCoeff(&imax);
  pi[imax] -= pi.sum() - 1.0;

  std::set<std::pair<int, int>> used;
  std::vector<mixbound::EdgeSpec> edges;
  const auto add_edge = [&](int x, int y) {
    if (x > y) std::swap(x, y);
    if (!used.insert({x, y}).second) return;
    const double q = unif(rng);
    mixbound::EdgeSpec e;
    e.x = x;
    e.y = y;
    e.rate_xy = q / pi[x];
    e.rate_yx = q / pi[y];
    edges.push_back(e);
  };
  for (int v = 1; v < n; ++v) {
    add_edge(std::uniform_int_distribution<int>(0, v - 1)(rng), v);
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      if (coin(rng) < extra_edge_prob) add_edge(x, y);
    }
  }
  return mixbound::build_chain(n, edges, pi);
}

// log sum_x exp(-beta H(x)) in extended precision, summed in ascending order
// of the terms (deliberately different from the library's traversal order).
inline double log_partition_direct(const Eigen::VectorXd& H, double beta) {
  std::vector<double> logs(H.size());
  for (Eigen::Index i = 0; i < H.size(); ++i) logs[i] = -beta * H[i];
  std::sort(logs.begin(), logs.end());
  const double m = logs.back();
  long double s = 0.0L;
  for (double v : logs) s += expl(static_cast<long double>(v - m));
  return m + static_cast<double>(logl(s));
}

// True bias-weighted decay sup_{||f||_inf <= 1} sum_y eta(y) |(P_t f)(y) - pi f|
// by enumerating the 2^n sign vertices of the sup-norm ball (the objective is
// convex, so the sup is attained at a vertex).  Only feasible for small n.
inline double brute_force_d_eta(const Eigen::MatrixXd& P_t,
                                const Eigen::VectorXd& pi,
                                const Eigen::VectorXd& eta) {
  const int n = static_cast<int>(pi.size());
  double best = 0.0;
  Eigen::VectorXd f(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    for (int i = 0; i < n; ++i) f[i] = (mask >> i) & 1u ? 1.0 : -1.0;
    const double center = pi.dot(f);
    double value = 0.0;
    for (int y = 0; y < n; ++y) {
      value += eta[y] * std::abs(P_t.row(y).dot(f) - center);
    }
    best = std::max(best, value);
  }
  return best;
}

// Total variation between two distributions, the naive way.
inline double tv_direct(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  return 0.5 * (p - q).cwiseAbs().sum();
}

// Spectral gap from the dense symmetrized generator.
inline double gap_direct(const mixbound::ReversibleChain& chain) {
  const int n = chain.n();
  const Eigen::MatrixXd A = generator_matrix(chain);
  Eigen::VectorXd sqrt_pi(n);
  for (int i = 0; i < n; ++i) sqrt_pi[i] = std::sqrt(chain.pi()[i]);
  Eigen::MatrixXd S(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      S(i, j) = sqrt_pi[i] * A(i, j) / sqrt_pi[j];
    }
  }
  S = ((S + S.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  return -solver.eigenvalues()[n - 2];
}

}  // namespace oracle
