#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mixbound/chain.hpp"

namespace mixbound {

// ---------------------------------------------------------------------------
// path families
// ---------------------------------------------------------------------------

// One selected path per ordered pair (x, y), x != y.  Families are streamed:
// visit() reports the consecutive directed steps of the pair's path without
// materializing all paths (hypercube families at N = 12 have ~17M pairs).
class PathFamily {
 public:
  using StepFn = std::function<void(int, int)>;

  virtual ~PathFamily() = default;
  virtual int num_states() const = 0;
  // Calls step(u, v) for each directed step along the path from x to y, in
  // order.  Returns false when the family has no path for this pair.
  virtual bool visit(int x, int y, const StepFn& step) const = 0;
};

// Paths stored explicitly as vertex lists (file-loaded families, fixtures).
class ExplicitPathFamily final : public PathFamily {
 public:
  explicit ExplicitPathFamily(int n) : n_(n) {}

  // Registers the path for the ordered pair (vertices.front(),
  // vertices.back()).  Throws NonPositiveInput on malformed input.
  void set_path(std::vector<int> vertices);

  int num_states() const override { return n_; }
  bool visit(int x, int y, const StepFn& step) const override;

 private:
  int n_ = 0;
  std::unordered_map<std::int64_t, std::vector<int>> paths_;
};

// Breadth-first shortest paths on the positive-conductance graph, one tree
// per source; deterministic (neighbors scanned in sorted state order).
class BfsPathFamily final : public PathFamily {
 public:
  explicit BfsPathFamily(const ReversibleChain& chain);

  int num_states() const override { return n_; }
  bool visit(int x, int y, const StepFn& step) const override;

 private:
  int n_ = 0;
  std::vector<int> parent_;  // parent_[x * n + y] = predecessor of y in the tree rooted at x
};

BfsPathFamily shortest_path_family(const ReversibleChain& chain);

// ---------------------------------------------------------------------------
// bound reports
// ---------------------------------------------------------------------------

struct WeightAssignment {
  std::vector<double> lambda;  // per-state, strictly positive
  std::vector<double> mu;      // per-state, strictly positive

  static WeightAssignment unit(int n);
};

struct BoundReport {
  std::string name;
  double value = 0.0;
  double log_value = 0.0;
  std::map<std::string, double> parameters;
  std::map<std::string, std::string> provenance;
};

// ---------------------------------------------------------------------------
// certified geometric bounds
// ---------------------------------------------------------------------------

// Weighted canonical-path bound on 1/L_eta(p) (hence a certified lower bound
// L_eta(p) >= 1/value):
//
//   1/L_eta(p) <= 2^{2/p-1} * (sum_x pi lambda^{p/(1-p)}
//                              * sum_y eta mu^{p/(1-p)})^{(2-2p)/p}
//                 * sum_{directed e} (1/Q(e)) W_e^2,
//   W_e = sum_{(x,y): e in gamma(x,y)} pi(x) eta(y) / (lambda(x) mu(y)),
//
// with the p = 1 limit (unit weights required) 2 * sum_e (1/Q(e)) W_e^2.
// Sums over directed edges; each ordered pair's path traverses its edges in
// one direction.  Throws PathMissing / ZeroConductanceEdge / NonPositiveInput.
BoundReport path_bound_L_eta(const ReversibleChain& chain,
                             const PathFamily& paths,
                             const WeightAssignment& weights, double p,
                             const ProbabilityVector& eta);

// Canonical-path bound on 1/gap:
//   1/gap <= max_e (1/Q(e)) sum_{(x,y): e in gamma(x,y)} |gamma(x,y)| pi(x) pi(y)
// with undirected edge containment (both traversal directions accumulate
// into the same edge).
BoundReport path_bound_gap(const ReversibleChain& chain,
                           const PathFamily& paths);

// Good/bad-set bound on 1/L_eta(p): with the state space partitioned into
// G | B (and G_eta | B_eta for the eta side; defaults to G | B),
//
//   1/L_eta(p) <= 2^{6/p-3} { gamma* sup_e (1/Q(e)) sum_{x in G, y in G_eta,
//                             e in gamma(x,y)} pi(x) eta(y)
//     + 2 (sum_{e in Bad} 1/Q(e)) (pi(B)^{2/p} + eta(B_eta)^{2/p}) },
//
// where gamma* is the maximum path length over all ordered pairs and Bad is
// the set of directed edges lying on the path of at least one pair with
// x in B or y in B_eta.  Throws PartitionInvalid on malformed partitions.
BoundReport good_bad_bound(const ReversibleChain& chain,
                           const PathFamily& paths, double p,
                           const ProbabilityVector& eta,
                           const std::vector<int>& B, const std::vector<int>& G,
                           const std::vector<int>* B_eta = nullptr,
                           const std::vector<int>* G_eta = nullptr);

// The weight choice under which the good/bad bound dominates the weighted
// path bound: lambda = pi(B)^{1-1/p} on B and 1 on G; mu = eta(B_eta)^{1-1/p}
// on B_eta and 1 on G_eta.
WeightAssignment theorem_weight_assignment(const ReversibleChain& chain,
                                           double p,
                                           const ProbabilityVector& eta,
                                           const std::vector<int>& B,
                                           const std::vector<int>* B_eta = nullptr);

}  // namespace mixbound
