// Tests for the canonical-path machinery: path families, the weighted
// functional-constant bound, the spectral-gap bound, and the good/bad-set
// bound.
#include <cmath>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "doctest.h"
#include "mixbound/chain.hpp"
#include "mixbound/constants.hpp"
#include "mixbound/errors.hpp"
#include "mixbound/hypercube.hpp"
#include "mixbound/path_bounds.hpp"
#include "mixbound/rem.hpp"
#include "mixbound/util.hpp"
#include "oracles.hpp"

using namespace mixbound;

namespace {

// Symmetric two-state chain: rates 1/1, pi uniform, Q = 1/2, gap = 2.
ReversibleChain symmetric_two_state() {
  return build_chain(2, {{0, 1, 1.0, 1.0}},
                     Eigen::VectorXd::Constant(2, 0.5));
}

// Uniform path 0 - 1 - 2 with unit rates.
ReversibleChain path3() {
  return build_chain(3, {{0, 1, 1.0, 1.0}, {1, 2, 1.0, 1.0}},
                     Eigen::VectorXd::Constant(3, 1.0 / 3.0));
}

ExplicitPathFamily full_pair_family(const ReversibleChain& chain,
                                    const BfsPathFamily& bfs) {
  ExplicitPathFamily fam(chain.n());
  for (int x = 0; x < chain.n(); ++x) {
    for (int y = 0; y < chain.n(); ++y) {
      if (x == y) continue;
      std::vector<int> verts = {x};
      bfs.visit(x, y, [&](int, int v) { verts.push_back(v); });
      fam.set_path(std::move(verts));
    }
  }
  return fam;
}

ProbabilityVector random_eta(int n, std::mt19937_64& rng) {
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.05 + uniform_unit(rng);
  w /= w.sum();
  w[0] += 1.0 - w.sum();
  return ProbabilityVector(w);
}

Eigen::VectorXd centered_witness(const ReversibleChain& chain,
                                 std::mt19937_64& rng) {
  Eigen::VectorXd f(chain.n());
  std::normal_distribution<double> gauss;
  for (int i = 0; i < chain.n(); ++i) f[i] = gauss(rng);
  f.array() -= chain.pi().dot(f);
  f.array() -= chain.pi().dot(f);
  return f;
}

}  // namespace

TEST_CASE("two-state hand values") {
  const ReversibleChain chain = symmetric_two_state();
  const BfsPathFamily paths = shortest_path_family(chain);
  const ProbabilityVector eta = ProbabilityVector::uniform(2);
  // p = 1 weighted bound: 2 * sum_{directed e} (1/Q) W_e^2 with
  // W = pi(x) eta(y) = 1/4 on each direction and Q = 1/2:
  // 2 * 2 * 2 * (1/16) = 1/2.
  const BoundReport b =
      path_bound_L_eta(chain, paths, WeightAssignment::unit(2), 1.0, eta);
  CHECK(b.value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(b.log_value == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(b.name == "path_bound_inv_L_eta");
  CHECK(b.parameters.at("p") == 1.0);
  // Gap bound: single undirected edge carries both ordered pairs, each with
  // |gamma| = 1 and pi pi = 1/4: (1/Q) * 1/2 = 1.
  const BoundReport g = path_bound_gap(chain, paths);
  CHECK(g.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.name == "path_bound_inv_gap");
  CHECK(g.parameters.at("gamma_star") == 1.0);
  // Certified direction: true 1/gap = 1/2 <= 1.
  CHECK(g.value * 2.0 >= 1.0);
}

TEST_CASE("explicit family validation and lookup") {
  ExplicitPathFamily fam(3);
  CHECK_THROWS_AS(fam.set_path({0}), NonPositiveInput);
  CHECK_THROWS_AS(fam.set_path({0, 5}), NonPositiveInput);
  CHECK_THROWS_AS(fam.set_path({0, 1, 0}), NonPositiveInput);
  fam.set_path({0, 1, 2});
  std::vector<std::pair<int, int>> steps;
  CHECK(fam.visit(0, 2, [&](int u, int v) { steps.emplace_back(u, v); }));
  REQUIRE(steps.size() == 2);
  CHECK(steps[0] == std::make_pair(0, 1));
  CHECK(steps[1] == std::make_pair(1, 2));
  CHECK_FALSE(fam.visit(2, 0, [](int, int) {}));
}

TEST_CASE("BFS family walks the line graph") {
  const ReversibleChain chain = path3();
  const BfsPathFamily fam = shortest_path_family(chain);
  CHECK(fam.num_states() == 3);
  std::vector<std::pair<int, int>> steps;
  CHECK(fam.visit(2, 0, [&](int u, int v) { steps.emplace_back(u, v); }));
  REQUIRE(steps.size() == 2);
  CHECK(steps[0] == std::make_pair(2, 1));
  CHECK(steps[1] == std::make_pair(1, 0));
}

TEST_CASE("missing and off-graph paths raise the dedicated errors") {
  const ReversibleChain chain = path3();
  const ProbabilityVector eta = ProbabilityVector::uniform(3);
  ExplicitPathFamily missing(3);
  missing.set_path({0, 1});  // every other ordered pair is absent
  CHECK_THROWS_AS(path_bound_L_eta(chain, missing, WeightAssignment::unit(3),
                                   1.0, eta),
                  PathMissing);
  CHECK_THROWS_AS(path_bound_gap(chain, missing), PathMissing);

  // 0 -> 2 jumps across a non-edge: flagged during accumulation.
  ExplicitPathFamily offgraph(3);
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      if (x != y) {
        std::vector<int> verts = {x};
        if (std::abs(x - y) == 2) {
          verts = {x, y};  // the illegal chord
        } else {
          verts.push_back(y);
        }
        offgraph.set_path(std::move(verts));
      }
    }
  }
  CHECK_THROWS_AS(path_bound_gap(chain, offgraph), ZeroConductanceEdge);
}

TEST_CASE("p = 1 limit demands unit weights") {
  const ReversibleChain chain = symmetric_two_state();
  const BfsPathFamily paths = shortest_path_family(chain);
  const ProbabilityVector eta = ProbabilityVector::uniform(2);
  WeightAssignment w = WeightAssignment::unit(2);
  w.lambda[0] = 2.0;
  CHECK_THROWS_AS(path_bound_L_eta(chain, paths, w, 1.0, eta),
                  NonPositiveInput);
  WeightAssignment neg = WeightAssignment::unit(2);
  neg.mu[1] = 0.0;
  CHECK_THROWS_AS(path_bound_L_eta(chain, paths, neg, 0.5, eta),
                  NonPositiveInput);
  CHECK_THROWS_AS(path_bound_L_eta(chain, paths, WeightAssignment::unit(2),
                                   1.5, eta),
                  NonPositiveInput);
}

TEST_CASE("path bound certifies 1/L_eta on random chains") {
  std::mt19937_64 rng(1701u);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    const ReversibleChain chain = oracle::random_chain(n, rng);
    const BfsPathFamily paths = shortest_path_family(chain);
    const ProbabilityVector eta = random_eta(n, rng);
    for (double p : {0.5, 1.0}) {
      WeightAssignment w = WeightAssignment::unit(n);
      if (p < 1.0) {
        // The bound holds for arbitrary positive weights; stress that.
        for (int i = 0; i < n; ++i) {
          w.lambda[i] = 0.25 + uniform_unit(rng);
          w.mu[i] = 0.25 + uniform_unit(rng);
        }
      }
      const BoundReport rep = path_bound_L_eta(chain, paths, w, p, eta);
      CHECK(std::isfinite(rep.value));
      CHECK(rep.value > 0.0);
      for (int k = 0; k < 10; ++k) {
        const Eigen::VectorXd f = centered_witness(chain, rng);
        const double ratio =
            constant_ratio(chain, ConstantFamily::L_eta, p, f, &eta);
        // ratio >= L_eta(p) >= 1/value.
        CHECK(rep.value * ratio >= 1.0 - 1e-10);
      }
    }
  }
}

TEST_CASE("gap path bound certifies 1/gap on random chains") {
  std::mt19937_64 rng(2718u);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 6);
    const ReversibleChain chain = oracle::random_chain(n, rng);
    const BfsPathFamily paths = shortest_path_family(chain);
    const BoundReport rep = path_bound_gap(chain, paths);
    const double gap = oracle::gap_direct(chain);
    CHECK(rep.value * gap >= 1.0 - 1e-10);
  }
}

TEST_CASE("path bounds certify REM chains with selected hypercube paths") {
  for (std::uint64_t seed : {11u, 12u}) {
    const RemInstance inst = sample_instance(5, 0.8, seed);
    const ReversibleChain chain = metropolis_chain(inst);
    const RemPathFamily fam = select_paths(inst.H, 5, 1.0);
    const ProbabilityVector eta = ProbabilityVector::uniform(32);
    std::mt19937_64 rng(seed);
    const BoundReport rep = path_bound_L_eta(
        chain, fam, WeightAssignment::unit(32), 1.0, eta);
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd f = centered_witness(chain, rng);
      const double ratio =
          constant_ratio(chain, ConstantFamily::L_eta, 1.0, f, &eta);
      CHECK(rep.value * ratio >= 1.0 - 1e-10);
    }
    const BoundReport grep = path_bound_gap(chain, fam);
    CHECK(grep.value * oracle::gap_direct(chain) >= 1.0 - 1e-10);
  }
}

TEST_CASE("good/bad bound dominates the weighted bound at the theorem weights") {
  std::mt19937_64 rng(31415u);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 5);
    const ReversibleChain chain = oracle::random_chain(n, rng);
    const BfsPathFamily paths = shortest_path_family(chain);
    const ProbabilityVector eta = random_eta(n, rng);
    // Random nonempty proper partition.
    std::vector<int> B, G;
    do {
      B.clear();
      G.clear();
      for (int s = 0; s < n; ++s) (rng() & 1u ? B : G).push_back(s);
    } while (B.empty() || G.empty());
    for (double p : {0.5, 0.8, 1.0}) {
      const WeightAssignment w = theorem_weight_assignment(chain, p, eta, B);
      const BoundReport weighted = path_bound_L_eta(chain, paths, w, p, eta);
      const BoundReport gb = good_bad_bound(chain, paths, p, eta, B, G);
      CHECK(gb.value >= weighted.value * (1.0 - 1e-12));
      CHECK(gb.parameters.at("pi_B") > 0.0);
    }
  }
}

TEST_CASE("empty bad set reduces to the congestion term") {
  const ReversibleChain chain = path3();
  const BfsPathFamily paths = shortest_path_family(chain);
  const ProbabilityVector eta = ProbabilityVector::uniform(3);
  const double p = 0.5;
  std::vector<int> B, G = {0, 1, 2};
  const BoundReport rep = good_bad_bound(chain, paths, p, eta, B, G);
  CHECK(rep.parameters.at("sum_inv_q_bad") == 0.0);
  CHECK(rep.parameters.at("pi_B") == 0.0);
  // Independent recomputation of sup_e (1/Q) sum pi(x) eta(y) over directed
  // edges and of gamma*.
  std::map<std::pair<int, int>, double> mass;
  double gamma_star = 0.0;
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      if (x == y) continue;
      std::vector<std::pair<int, int>> steps;
      paths.visit(x, y, [&](int u, int v) { steps.emplace_back(u, v); });
      gamma_star = std::max(gamma_star, static_cast<double>(steps.size()));
      for (auto& s : steps) mass[s] += chain.pi()[x] * eta[y];
    }
  }
  double sup = 0.0;
  for (auto& [edge, m] : mass) {
    const int e = chain.edge_index(edge.first, edge.second);
    sup = std::max(sup, m / chain.conductance(e));
  }
  const double expected = std::pow(2.0, 6.0 / p - 3.0) * gamma_star * sup;
  CHECK(rep.value == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("partition validation") {
  const ReversibleChain chain = path3();
  const BfsPathFamily paths = shortest_path_family(chain);
  const ProbabilityVector eta = ProbabilityVector::uniform(3);
  // Overlap.
  CHECK_THROWS_AS(good_bad_bound(chain, paths, 0.5, eta, {0}, {0, 1, 2}),
                  PartitionInvalid);
  // Missing state.
  CHECK_THROWS_AS(good_bad_bound(chain, paths, 0.5, eta, {0}, {1}),
                  PartitionInvalid);
  // Out of range.
  CHECK_THROWS_AS(good_bad_bound(chain, paths, 0.5, eta, {3}, {0, 1, 2}),
                  PartitionInvalid);
  // eta-side sets must come as a pair.
  const std::vector<int> be = {0};
  CHECK_THROWS_AS(
      good_bad_bound(chain, paths, 0.5, eta, {0}, {1, 2}, &be, nullptr),
      PartitionInvalid);
  CHECK_THROWS_AS(theorem_weight_assignment(chain, 0.5, eta, {7}),
                  PartitionInvalid);
}

TEST_CASE("theorem weights: closed form and exact p = 1 collapse") {
  std::mt19937_64 rng(7u);
  const ReversibleChain chain = oracle::random_chain(4, rng);
  const ProbabilityVector eta = ProbabilityVector::uniform(4);
  const std::vector<int> B = {1, 3};
  // p = 1: pi(B)^{1 - 1/p} = pi(B)^0 == 1 exactly, so the weights are unit
  // and directly admissible in the p = 1 bound.
  const WeightAssignment w1 = theorem_weight_assignment(chain, 1.0, eta, B);
  for (int i = 0; i < 4; ++i) {
    CHECK(w1.lambda[i] == 1.0);
    CHECK(w1.mu[i] == 1.0);
  }
  // p = 1/2: weight pi(B)^{-1} on B, 1 on G.
  const WeightAssignment w = theorem_weight_assignment(chain, 0.5, eta, B);
  const double pi_b = chain.pi()[1] + chain.pi()[3];
  const double eta_b = eta[1] + eta[3];
  for (int i = 0; i < 4; ++i) {
    const bool in_b = i == 1 || i == 3;
    CHECK(w.lambda[i] ==
          doctest::Approx(in_b ? 1.0 / pi_b : 1.0).epsilon(1e-14));
    CHECK(w.mu[i] == doctest::Approx(in_b ? 1.0 / eta_b : 1.0).epsilon(1e-14));
  }
}
