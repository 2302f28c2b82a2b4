#include "mixbound/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mixbound {

namespace {

std::string pair_str(int x, int y) {
  return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

}  // namespace

ProbabilityVector::ProbabilityVector(Eigen::VectorXd p) : p_(std::move(p)) {
  if (p_.size() == 0) throw NonPositiveInput("empty probability vector");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 0.0) || !std::isfinite(p_[i]))
      throw NonPositiveInput("probability vector entry " + std::to_string(i) +
                             " is negative or not finite");
    sum += p_[i];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw NonPositiveInput("probability vector sums to " +
                           std::to_string(sum) + ", not 1 within 1e-12");
}

ProbabilityVector ProbabilityVector::uniform(int n) {
  return ProbabilityVector(Eigen::VectorXd::Constant(n, 1.0 / n));
}

ProbabilityVector ProbabilityVector::point_mass(int n, int x) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  p[x] = 1.0;
  return ProbabilityVector(std::move(p));
}

int ReversibleChain::edge_index(int x, int y) const {
  const Arc* lo = arcs_begin(x);
  const Arc* hi = arcs_end(x);
  while (lo < hi) {
    const Arc* mid = lo + (hi - lo) / 2;
    if (mid->to < y)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < arcs_end(x) && lo->to == y) return lo->edge;
  return -1;
}

double ReversibleChain::rate(int x, int y) const {
  const int e = edge_index(x, y);
  if (e < 0) return 0.0;
  const EdgeSpec& es = edges_[e];
  return es.x == x ? es.rate_xy : es.rate_yx;
}

ReversibleChain build_chain(int n, const std::vector<EdgeSpec>& edges,
                            const Eigen::VectorXd& pi) {
  if (n < 1) throw NonPositiveInput("chain must have at least one state");
  if (pi.size() != n)
    throw NonPositivePi("pi has length " + std::to_string(pi.size()) +
                        ", expected " + std::to_string(n));
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(pi[i] > 0.0) || !std::isfinite(pi[i]))
      throw NonPositivePi("pi(" + std::to_string(i) +
                          ") is not strictly positive");
    sum += pi[i];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw NonPositivePi("pi sums to " + std::to_string(sum) +
                        ", not 1 within 1e-12");

  ReversibleChain c;
  c.n_ = n;
  c.pi_ = pi;
  c.min_pi_ = pi.minCoeff();
  c.edges_.reserve(edges.size());
  c.q_.reserve(edges.size());

  std::vector<int> deg(n, 0);
  for (const EdgeSpec& e : edges) {
    if (e.x < 0 || e.x >= n || e.y < 0 || e.y >= n)
      throw NonPositiveInput("edge " + pair_str(e.x, e.y) + " out of range");
    if (e.x == e.y)
      throw NonPositiveInput("self-loop at state " + std::to_string(e.x) +
                             " (diagonal rates are not part of a chain)");
    if (!(e.rate_xy >= 0.0) || !(e.rate_yx >= 0.0) ||
        !std::isfinite(e.rate_xy) || !std::isfinite(e.rate_yx))
      throw NonPositiveInput("edge " + pair_str(e.x, e.y) +
                             " has a negative or non-finite rate");
    const double qxy = pi[e.x] * e.rate_xy;
    const double qyx = pi[e.y] * e.rate_yx;
    const double scale = std::max(qxy, qyx);
    if (std::abs(qxy - qyx) > 1e-10 * scale)
      throw DetailedBalanceViolation(
          "edge " + pair_str(e.x, e.y) + ": pi(x)K(x,y)=" +
          std::to_string(qxy) + " vs pi(y)K(y,x)=" + std::to_string(qyx));
    c.edges_.push_back(e);
    c.q_.push_back(0.5 * (qxy + qyx));
    ++deg[e.x];
    ++deg[e.y];
  }

  // CSR assembly.
  c.offsets_.assign(n + 1, 0);
  for (int x = 0; x < n; ++x) c.offsets_[x + 1] = c.offsets_[x] + deg[x];
  c.arcs_.resize(c.offsets_[n]);
  std::vector<int> cursor(c.offsets_.begin(), c.offsets_.end() - 1);
  for (int e = 0; e < static_cast<int>(c.edges_.size()); ++e) {
    const EdgeSpec& es = c.edges_[e];
    c.arcs_[cursor[es.x]++] = {es.y, es.rate_xy, e};
    c.arcs_[cursor[es.y]++] = {es.x, es.rate_yx, e};
  }
  for (int x = 0; x < n; ++x)
    std::sort(c.arcs_.begin() + c.offsets_[x], c.arcs_.begin() + c.offsets_[x + 1],
              [](const ReversibleChain::Arc& a, const ReversibleChain::Arc& b) {
                return a.to < b.to;
              });
  // duplicate pair detection (after sorting, duplicates are adjacent)
  for (int x = 0; x < n; ++x)
    for (const auto* a = c.arcs_begin(x); a + 1 < c.arcs_end(x); ++a)
      if (a->to == (a + 1)->to)
        throw NonPositiveInput("duplicate edge " + pair_str(x, a->to));

  c.total_rate_.assign(n, 0.0);
  for (int x = 0; x < n; ++x) {
    double r = 0.0;
    for (const auto* a = c.arcs_begin(x); a != c.arcs_end(x); ++a)
      r += a->rate;
    c.total_rate_[x] = r;
  }
  c.max_total_rate_ =
      *std::max_element(c.total_rate_.begin(), c.total_rate_.end());

  // Irreducibility on the graph of edges with positive conductance.
  std::vector<int> stack{0};
  std::vector<char> seen(n, 0);
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    for (const auto* a = c.arcs_begin(x); a != c.arcs_end(x); ++a) {
      if (c.q_[a->edge] <= 0.0) continue;
      if (!seen[a->to]) {
        seen[a->to] = 1;
        ++reached;
        stack.push_back(a->to);
      }
    }
  }
  if (reached != n)
    throw NotIrreducible("positive-conductance edges reach only " +
                         std::to_string(reached) + " of " + std::to_string(n) +
                         " states");
  return c;
}

double dirichlet_form(const ReversibleChain& chain, const Eigen::VectorXd& f,
                      const Eigen::VectorXd& g) {
  if (f.size() != chain.n() || g.size() != chain.n())
    throw NonPositiveInput("dirichlet_form: function length mismatch");
  double acc = 0.0;
  for (int e = 0; e < chain.num_edges(); ++e) {
    const EdgeSpec& es = chain.edge(e);
    acc += chain.conductance(e) * (f[es.x] - f[es.y]) * (g[es.x] - g[es.y]);
  }
  return acc;
}

}  // namespace mixbound
