#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mixbound/errors.hpp"

namespace mixbound {

// ---------------------------------------------------------------------------
// probability vectors
// ---------------------------------------------------------------------------

// Probability vector on {0,...,n-1}: entries >= 0, sum within 1e-12 of 1.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(Eigen::VectorXd p);

  static ProbabilityVector uniform(int n);
  static ProbabilityVector point_mass(int n, int x);

  const Eigen::VectorXd& vec() const { return p_; }
  double operator[](int i) const { return p_[i]; }
  int size() const { return static_cast<int>(p_.size()); }

 private:
  Eigen::VectorXd p_;
};

// ---------------------------------------------------------------------------
// reversible continuous-time chains
// ---------------------------------------------------------------------------

// One unordered pair of states with its two directed jump rates.
struct EdgeSpec {
  int x = 0;
  int y = 0;
  double rate_xy = 0.0;  // K(x,y)
  double rate_yx = 0.0;  // K(y,x)
};

// Finite-state continuous-time chain, reversible with respect to pi.
// Internally stores the undirected edge list plus a CSR adjacency with
// per-state neighbor lists sorted by target state, so edge lookups are
// O(log degree).
//
// Conventions: K(x,y) is the jump rate, Q(e) = pi(x) K(x,y) = pi(y) K(y,x)
// the edge conductance, and the symmetric kernel is k(x,y) = K(x,y)/pi(y).
class ReversibleChain {
 public:
  struct Arc {
    int to = 0;         // neighbor state
    double rate = 0.0;  // K(from, to)
    int edge = 0;       // index into edges()
  };

  int n() const { return n_; }
  const Eigen::VectorXd& pi() const { return pi_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<EdgeSpec>& edges() const { return edges_; }
  const EdgeSpec& edge(int e) const { return edges_[e]; }

  // Q(e) = pi(x) K(x,y); symmetric by detailed balance (stored once).
  double conductance(int e) const { return q_[e]; }

  // Arcs out of x, sorted by target state.
  const Arc* arcs_begin(int x) const { return arcs_.data() + offsets_[x]; }
  const Arc* arcs_end(int x) const { return arcs_.data() + offsets_[x + 1]; }
  int degree(int x) const { return offsets_[x + 1] - offsets_[x]; }

  double total_rate(int x) const { return total_rate_[x]; }
  double max_total_rate() const { return max_total_rate_; }

  // Index of the unordered edge {x,y}, or -1 if absent.
  int edge_index(int x, int y) const;
  // K(x,y); 0 if {x,y} is not an edge.
  double rate(int x, int y) const;

  double min_pi() const { return min_pi_; }

 private:
  friend ReversibleChain build_chain(int n, const std::vector<EdgeSpec>& edges,
                                     const Eigen::VectorXd& pi);
  int n_ = 0;
  Eigen::VectorXd pi_;
  std::vector<EdgeSpec> edges_;
  std::vector<double> q_;
  std::vector<int> offsets_;
  std::vector<Arc> arcs_;
  std::vector<double> total_rate_;
  double max_total_rate_ = 0.0;
  double min_pi_ = 0.0;
};

// Validates and assembles a chain:
//  - pi must have positive entries summing to 1 within 1e-12 (NonPositivePi),
//  - rates must be >= 0 and finite (NonPositiveInput), no self-loops or
//    duplicate pairs,
//  - detailed balance pi(x)K(x,y) = pi(y)K(y,x) within 1e-10 relative to the
//    larger flux (DetailedBalanceViolation),
//  - the graph of edges with Q > 0 must connect all states (NotIrreducible).
ReversibleChain build_chain(int n, const std::vector<EdgeSpec>& edges,
                            const Eigen::VectorXd& pi);

// Dirichlet form E(f,g) = (1/2) sum_{x,y} (f(x)-f(y))(g(x)-g(y)) k(x,y)
// pi(x) pi(y) = sum over unordered edges of Q(e) (f(x)-f(y))(g(x)-g(y)).
double dirichlet_form(const ReversibleChain& chain, const Eigen::VectorXd& f,
                      const Eigen::VectorXd& g);

}  // namespace mixbound
