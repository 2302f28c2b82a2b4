#include "mixbound/path_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "mixbound/errors.hpp"

namespace mixbound {

// -----------------------------------------------------------------------------
// explicit family
// -----------------------------------------------------------------------------

void ExplicitPathFamily::set_path(std::vector<int> vertices) {
  if (vertices.size() < 2) {
    throw NonPositiveInput("ExplicitPathFamily: a path needs >= 2 vertices");
  }
  for (int v : vertices) {
    if (v < 0 || v >= n_) {
      throw NonPositiveInput("ExplicitPathFamily: vertex " + std::to_string(v) +
                             " out of range [0, " + std::to_string(n_) + ")");
    }
  }
  const int x = vertices.front();
  const int y = vertices.back();
  if (x == y) {
    throw NonPositiveInput("ExplicitPathFamily: path endpoints coincide");
  }
  paths_[static_cast<std::int64_t>(x) * n_ + y] = std::move(vertices);
}

bool ExplicitPathFamily::visit(int x, int y, const StepFn& step) const {
  const auto it = paths_.find(static_cast<std::int64_t>(x) * n_ + y);
  if (it == paths_.end()) return false;
  const std::vector<int>& vs = it->second;
  for (std::size_t i = 0; i + 1 < vs.size(); ++i) step(vs[i], vs[i + 1]);
  return true;
}

// -----------------------------------------------------------------------------
// BFS shortest paths
// -----------------------------------------------------------------------------

BfsPathFamily::BfsPathFamily(const ReversibleChain& chain) : n_(chain.n()) {
  parent_.assign(static_cast<std::size_t>(n_) * n_, -1);
  std::deque<int> queue;
  for (int src = 0; src < n_; ++src) {
    int* parent = parent_.data() + static_cast<std::size_t>(src) * n_;
    parent[src] = src;
    queue.clear();
    queue.push_back(src);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (const auto* a = chain.arcs_begin(u); a != chain.arcs_end(u); ++a) {
        if (a->rate <= 0.0 || parent[a->to] >= 0) continue;
        parent[a->to] = u;
        queue.push_back(a->to);
      }
    }
  }
}

bool BfsPathFamily::visit(int x, int y, const StepFn& step) const {
  const int* parent = parent_.data() + static_cast<std::size_t>(x) * n_;
  if (parent[y] < 0) return false;
  std::vector<int> back;
  for (int v = y; v != x; v = parent[v]) back.push_back(v);
  back.push_back(x);
  for (std::size_t i = back.size(); i-- > 1;) step(back[i], back[i - 1]);
  return true;
}

BfsPathFamily shortest_path_family(const ReversibleChain& chain) {
  return BfsPathFamily(chain);
}

WeightAssignment WeightAssignment::unit(int n) {
  WeightAssignment w;
  w.lambda.assign(n, 1.0);
  w.mu.assign(n, 1.0);
  return w;
}

// -----------------------------------------------------------------------------
// shared accumulation helpers
// -----------------------------------------------------------------------------

namespace {

// Directed-edge slot: 2*edge + 0 when traversed x->y as stored in EdgeSpec,
// 2*edge + 1 for the reverse direction.
struct StepResolver {
  const ReversibleChain& chain;

  int undirected(int u, int v) const {
    const int e = chain.edge_index(u, v);
    if (e < 0 || chain.conductance(e) <= 0.0) {
      throw ZeroConductanceEdge("path step (" + std::to_string(u) + ", " +
                                std::to_string(v) +
                                ") is not an edge with positive conductance");
    }
    return e;
  }
  int directed(int u, int v) const {
    const int e = undirected(u, v);
    return 2 * e + (chain.edge(e).x == u ? 0 : 1);
  }
};

// Streams the path for one ordered pair into a reusable step buffer.
void collect_path(const PathFamily& paths, int x, int y,
                  std::vector<std::pair<int, int>>& steps) {
  steps.clear();
  const bool found = paths.visit(x, y, [&steps](int u, int v) {
    steps.emplace_back(u, v);
  });
  if (!found) {
    throw PathMissing("no path for ordered pair (" + std::to_string(x) + ", " +
                      std::to_string(y) + ")");
  }
  if (steps.empty() || steps.front().first != x || steps.back().second != y) {
    throw PathMissing("path for ordered pair (" + std::to_string(x) + ", " +
                      std::to_string(y) + ") has wrong endpoints");
  }
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    if (steps[i].second != steps[i + 1].first) {
      throw PathMissing("path for ordered pair (" + std::to_string(x) + ", " +
                        std::to_string(y) + ") is not contiguous");
    }
  }
}

void check_weights(const WeightAssignment& weights, int n, double p) {
  if (static_cast<int>(weights.lambda.size()) != n ||
      static_cast<int>(weights.mu.size()) != n) {
    throw NonPositiveInput("path_bound_L_eta: weight vectors must have one entry per state");
  }
  for (int i = 0; i < n; ++i) {
    if (!(weights.lambda[i] > 0.0) || !(weights.mu[i] > 0.0)) {
      throw NonPositiveInput("path_bound_L_eta: weights must be strictly positive");
    }
  }
  if (p == 1.0) {
    for (int i = 0; i < n; ++i) {
      if (weights.lambda[i] != 1.0 || weights.mu[i] != 1.0) {
        throw NonPositiveInput(
            "path_bound_L_eta: the p = 1 limit is only valid with unit weights");
      }
    }
  }
}

}  // namespace

// -----------------------------------------------------------------------------
// weighted path bound on 1/L_eta(p)
// -----------------------------------------------------------------------------

BoundReport path_bound_L_eta(const ReversibleChain& chain,
                             const PathFamily& paths,
                             const WeightAssignment& weights, double p,
                             const ProbabilityVector& eta) {
  const int n = chain.n();
  if (!(p > 0.0 && p <= 1.0)) {
    throw NonPositiveInput("path_bound_L_eta: need p in (0, 1]");
  }
  if (eta.size() != n || paths.num_states() != n) {
    throw NonPositiveInput("path_bound_L_eta: size mismatch between chain, eta, and paths");
  }
  check_weights(weights, n, p);

  const StepResolver resolver{chain};
  std::vector<double> w(2 * static_cast<std::size_t>(chain.num_edges()), 0.0);
  std::vector<std::pair<int, int>> steps;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      const double mass =
          chain.pi()[x] * eta[y] / (weights.lambda[x] * weights.mu[y]);
      if (mass == 0.0) continue;
      collect_path(paths, x, y, steps);
      for (const auto& [u, v] : steps) w[resolver.directed(u, v)] += mass;
    }
  }
  double sum_term = 0.0;
  for (int e = 0; e < chain.num_edges(); ++e) {
    const double q = chain.conductance(e);
    if (q <= 0.0) continue;
    sum_term += (w[2 * e] * w[2 * e] + w[2 * e + 1] * w[2 * e + 1]) / q;
  }

  double r_lambda = 1.0, r_mu = 1.0, r_factor = 1.0;
  if (p < 1.0) {
    const double expo = p / (1.0 - p);
    r_lambda = r_mu = 0.0;
    for (int x = 0; x < n; ++x) {
      r_lambda += chain.pi()[x] * std::pow(weights.lambda[x], expo);
      r_mu += eta[x] * std::pow(weights.mu[x], expo);
    }
    r_factor = std::pow(r_lambda * r_mu, (2.0 - 2.0 * p) / p);
  }
  const double prefactor = std::pow(2.0, 2.0 / p - 1.0);
  const double value = prefactor * r_factor * sum_term;

  BoundReport report;
  report.name = "path_bound_inv_L_eta";
  report.value = value;
  report.log_value = std::log(value);
  report.parameters = {{"p", p},
                       {"prefactor", prefactor},
                       {"r_lambda", r_lambda},
                       {"r_mu", r_mu},
                       {"sum_term", sum_term}};
  return report;
}

// -----------------------------------------------------------------------------
// spectral-gap path bound
// -----------------------------------------------------------------------------

BoundReport path_bound_gap(const ReversibleChain& chain,
                           const PathFamily& paths) {
  const int n = chain.n();
  if (paths.num_states() != n) {
    throw NonPositiveInput("path_bound_gap: paths built for a different state count");
  }
  const StepResolver resolver{chain};
  std::vector<double> acc(chain.num_edges(), 0.0);
  std::vector<std::pair<int, int>> steps;
  double gamma_star = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      collect_path(paths, x, y, steps);
      gamma_star = std::max(gamma_star, static_cast<double>(steps.size()));
      const double mass =
          static_cast<double>(steps.size()) * chain.pi()[x] * chain.pi()[y];
      for (const auto& [u, v] : steps) acc[resolver.undirected(u, v)] += mass;
    }
  }
  double value = 0.0;
  int argmax = -1;
  for (int e = 0; e < chain.num_edges(); ++e) {
    const double q = chain.conductance(e);
    if (q <= 0.0) continue;
    const double candidate = acc[e] / q;
    if (candidate > value) {
      value = candidate;
      argmax = e;
    }
  }
  BoundReport report;
  report.name = "path_bound_inv_gap";
  report.value = value;
  report.log_value = value > 0.0 ? std::log(value)
                                 : -std::numeric_limits<double>::infinity();
  report.parameters = {{"gamma_star", gamma_star},
                       {"bottleneck_edge", static_cast<double>(argmax)}};
  return report;
}

// -----------------------------------------------------------------------------
// good/bad-set bound
// -----------------------------------------------------------------------------

namespace {

std::vector<char> partition_mask(int n, const std::vector<int>& B,
                                 const std::vector<int>& G) {
  std::vector<char> in_b(n, -1);
  const auto mark = [&](const std::vector<int>& set, char flag) {
    for (int s : set) {
      if (s < 0 || s >= n) {
        throw PartitionInvalid("good_bad_bound: state " + std::to_string(s) +
                               " out of range");
      }
      if (in_b[s] != -1) {
        throw PartitionInvalid("good_bad_bound: state " + std::to_string(s) +
                               " listed twice across B and G");
      }
      in_b[s] = flag;
    }
  };
  mark(B, 1);
  mark(G, 0);
  for (int s = 0; s < n; ++s) {
    if (in_b[s] == -1) {
      throw PartitionInvalid("good_bad_bound: state " + std::to_string(s) +
                             " missing from B union G");
    }
  }
  return in_b;
}

}  // namespace

BoundReport good_bad_bound(const ReversibleChain& chain,
                           const PathFamily& paths, double p,
                           const ProbabilityVector& eta,
                           const std::vector<int>& B, const std::vector<int>& G,
                           const std::vector<int>* B_eta,
                           const std::vector<int>* G_eta) {
  const int n = chain.n();
  if (!(p > 0.0 && p <= 1.0)) {
    throw NonPositiveInput("good_bad_bound: need p in (0, 1]");
  }
  if (eta.size() != n || paths.num_states() != n) {
    throw NonPositiveInput("good_bad_bound: size mismatch between chain, eta, and paths");
  }
  if ((B_eta == nullptr) != (G_eta == nullptr)) {
    throw PartitionInvalid("good_bad_bound: B_eta and G_eta must be given together");
  }
  const std::vector<char> in_b = partition_mask(n, B, G);
  const std::vector<char> in_b_eta =
      B_eta != nullptr ? partition_mask(n, *B_eta, *G_eta) : in_b;

  double pi_b = 0.0, eta_b = 0.0;
  for (int s = 0; s < n; ++s) {
    if (in_b[s]) pi_b += chain.pi()[s];
    if (in_b_eta[s]) eta_b += eta[s];
  }

  const StepResolver resolver{chain};
  const std::size_t slots = 2 * static_cast<std::size_t>(chain.num_edges());
  std::vector<double> good_mass(slots, 0.0);
  std::vector<char> bad_edge(slots, 0);
  std::vector<std::pair<int, int>> steps;
  double gamma_star = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      collect_path(paths, x, y, steps);
      gamma_star = std::max(gamma_star, static_cast<double>(steps.size()));
      const bool bad_pair = in_b[x] || in_b_eta[y];
      const double mass = bad_pair ? 0.0 : chain.pi()[x] * eta[y];
      for (const auto& [u, v] : steps) {
        const int slot = resolver.directed(u, v);
        if (bad_pair) {
          bad_edge[slot] = 1;
        } else {
          good_mass[slot] += mass;
        }
      }
    }
  }

  double sup_term = 0.0;
  double sum_inv_q_bad = 0.0;
  for (int e = 0; e < chain.num_edges(); ++e) {
    const double q = chain.conductance(e);
    if (q <= 0.0) continue;
    sup_term = std::max({sup_term, good_mass[2 * e] / q, good_mass[2 * e + 1] / q});
    if (bad_edge[2 * e]) sum_inv_q_bad += 1.0 / q;
    if (bad_edge[2 * e + 1]) sum_inv_q_bad += 1.0 / q;
  }

  const double prefactor = std::pow(2.0, 6.0 / p - 3.0);
  const double bad_term =
      2.0 * sum_inv_q_bad *
      (std::pow(pi_b, 2.0 / p) + std::pow(eta_b, 2.0 / p));
  const double value = prefactor * (gamma_star * sup_term + bad_term);

  BoundReport report;
  report.name = "good_bad_bound_inv_L_eta";
  report.value = value;
  report.log_value = value > 0.0 ? std::log(value)
                                 : -std::numeric_limits<double>::infinity();
  report.parameters = {{"p", p},
                       {"prefactor", prefactor},
                       {"gamma_star", gamma_star},
                       {"sup_term", sup_term},
                       {"sum_inv_q_bad", sum_inv_q_bad},
                       {"pi_B", pi_b},
                       {"eta_B_eta", eta_b},
                       {"distinct_eta_sets", B_eta != nullptr ? 1.0 : 0.0}};
  return report;
}

WeightAssignment theorem_weight_assignment(const ReversibleChain& chain,
                                           double p,
                                           const ProbabilityVector& eta,
                                           const std::vector<int>& B,
                                           const std::vector<int>* B_eta) {
  const int n = chain.n();
  if (!(p > 0.0 && p <= 1.0)) {
    throw NonPositiveInput("theorem_weight_assignment: need p in (0, 1]");
  }
  std::vector<char> in_b(n, 0);
  for (int s : B) {
    if (s < 0 || s >= n) {
      throw PartitionInvalid("theorem_weight_assignment: state out of range");
    }
    in_b[s] = 1;
  }
  std::vector<char> in_b_eta = in_b;
  if (B_eta != nullptr) {
    in_b_eta.assign(n, 0);
    for (int s : *B_eta) {
      if (s < 0 || s >= n) {
        throw PartitionInvalid("theorem_weight_assignment: state out of range");
      }
      in_b_eta[s] = 1;
    }
  }
  double pi_b = 0.0, eta_b = 0.0;
  for (int s = 0; s < n; ++s) {
    if (in_b[s]) pi_b += chain.pi()[s];
    if (in_b_eta[s]) eta_b += eta[s];
  }
  const double expo = 1.0 - 1.0 / p;
  // pow(0, 0) = 1 covers the p = 1 case; an empty bad set leaves all weights 1.
  const double lambda_b = pi_b > 0.0 ? std::pow(pi_b, expo) : 1.0;
  const double mu_b = eta_b > 0.0 ? std::pow(eta_b, expo) : 1.0;
  WeightAssignment weights = WeightAssignment::unit(n);
  for (int s = 0; s < n; ++s) {
    if (in_b[s]) weights.lambda[s] = lambda_b;
    if (in_b_eta[s]) weights.mu[s] = mu_b;
  }
  return weights;
}

}  // namespace mixbound
