#include <numeric>
#include <vector>

#include <doctest.h>

#include "mixbound/chain.hpp"
#include "mixbound/errors.hpp"
#include "mixbound/util.hpp"
#include "oracles.hpp"

using namespace mixbound;

namespace {

// Two states, unit rates both ways, uniform stationary law.
ReversibleChain two_state() {
  EdgeSpec e;
  e.x = 0;
  e.y = 1;
  e.rate_xy = 1.0;
  e.rate_yx = 1.0;
  return build_chain(2, {e}, Eigen::Vector2d(0.5, 0.5));
}

}  // namespace

TEST_CASE("two-state chain: conductance and Dirichlet form by hand") {
  const ReversibleChain chain = two_state();
  CHECK(chain.n() == 2);
  CHECK(chain.num_edges() == 1);
  // Q(e) = pi(0) K(0,1) = 1/2.
  CHECK(chain.conductance(0) == doctest::Approx(0.5).epsilon(1e-15));
  Eigen::VectorXd f(2);
  f << 1.0, -1.0;
  // E(f,f) = Q (f(0)-f(1))^2 = (1/2) * 4 = 2.
  CHECK(dirichlet_form(chain, f, f) == doctest::Approx(2.0).epsilon(1e-15));
  Eigen::VectorXd g(2);
  g << 2.0, 0.0;
  // Bilinearity: E(f,g) = Q * 2 * 2 = 2.
  CHECK(dirichlet_form(chain, f, g) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("accessors: edge lookup, rates, arc ordering, total rates") {
  std::vector<EdgeSpec> edges;
  const Eigen::Vector3d pi(0.2, 0.3, 0.5);
  auto add = [&](int x, int y, double q) {
    EdgeSpec e;
    e.x = x;
    e.y = y;
    e.rate_xy = q / pi[x];
    e.rate_yx = q / pi[y];
    edges.push_back(e);
  };
  add(0, 1, 0.1);
  add(1, 2, 0.2);
  add(0, 2, 0.15);
  const ReversibleChain chain = build_chain(3, edges, pi);

  CHECK(chain.edge_index(0, 1) >= 0);
  CHECK(chain.edge_index(1, 0) == chain.edge_index(0, 1));
  CHECK(chain.edge_index(0, 0) == -1);
  CHECK(chain.conductance(chain.edge_index(0, 2)) ==
        doctest::Approx(0.15).epsilon(1e-15));
  CHECK(chain.rate(1, 2) == doctest::Approx(0.2 / 0.3).epsilon(1e-15));
  CHECK(chain.rate(2, 1) == doctest::Approx(0.2 / 0.5).epsilon(1e-15));

  // Arcs out of each state are sorted by target and cover the neighbors.
  for (int x = 0; x < 3; ++x) {
    int prev = -1;
    double total = 0.0;
    for (auto it = chain.arcs_begin(x); it != chain.arcs_end(x); ++it) {
      CHECK(it->to > prev);
      prev = it->to;
      total += it->rate;
    }
    CHECK(chain.total_rate(x) == doctest::Approx(total).epsilon(1e-15));
    CHECK(chain.degree(x) == 2);
  }
  CHECK(chain.max_total_rate() ==
        doctest::Approx(std::max({chain.total_rate(0), chain.total_rate(1),
                                  chain.total_rate(2)})));
  CHECK(chain.min_pi() == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("dirichlet_form matches the direct directed-rate definition") {
  auto rng = seeded_engine(2024, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const ReversibleChain chain = oracle::random_chain(n, rng);
    Eigen::VectorXd f(n), g(n);
    for (int i = 0; i < n; ++i) {
      f[i] = uniform_unit(rng) * 2.0 - 1.0;
      g[i] = uniform_unit(rng) * 2.0 - 1.0;
    }
    CHECK(dirichlet_form(chain, f, g) ==
          doctest::Approx(oracle::dirichlet_direct(chain, f, g)).epsilon(1e-12));
  }
}

TEST_CASE("dirichlet form is invariant under relabeling the states") {
  auto rng = seeded_engine(99, 0);
  const int n = 6;
  const ReversibleChain chain = oracle::random_chain(n, rng);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  Eigen::VectorXd pi2(n);
  for (int i = 0; i < n; ++i) pi2[perm[i]] = chain.pi()[i];
  std::vector<EdgeSpec> edges2;
  for (int e = 0; e < chain.num_edges(); ++e) {
    EdgeSpec spec = chain.edge(e);
    spec.x = perm[spec.x];
    spec.y = perm[spec.y];
    edges2.push_back(spec);
  }
  const ReversibleChain relabeled = build_chain(n, edges2, pi2);

  Eigen::VectorXd f(n), f2(n);
  for (int i = 0; i < n; ++i) f[i] = uniform_unit(rng);
  for (int i = 0; i < n; ++i) f2[perm[i]] = f[i];
  CHECK(dirichlet_form(chain, f, f) ==
        doctest::Approx(dirichlet_form(relabeled, f2, f2)).epsilon(1e-13));
}

TEST_CASE("probability vector constructors and validation") {
  const ProbabilityVector u = ProbabilityVector::uniform(4);
  for (int i = 0; i < 4; ++i) CHECK(u[i] == doctest::Approx(0.25));
  const ProbabilityVector delta = ProbabilityVector::point_mass(4, 2);
  CHECK(delta[2] == 1.0);
  CHECK(delta[0] == 0.0);
  CHECK_THROWS_AS(ProbabilityVector(Eigen::Vector2d(0.7, 0.7)),
                  NonPositiveInput);
  CHECK_THROWS_AS(ProbabilityVector(Eigen::Vector2d(-0.1, 1.1)),
                  NonPositiveInput);
}

TEST_CASE("build_chain rejects malformed inputs with the named errors") {
  const Eigen::Vector2d pi(0.5, 0.5);
  EdgeSpec ok;
  ok.x = 0;
  ok.y = 1;
  ok.rate_xy = 1.0;
  ok.rate_yx = 1.0;

  SUBCASE("bad stationary vector") {
    CHECK_THROWS_AS(build_chain(2, {ok}, Eigen::Vector2d(1.0, 0.0)),
                    NonPositivePi);
    CHECK_THROWS_AS(build_chain(2, {ok}, Eigen::Vector2d(0.4, 0.4)),
                    NonPositivePi);
    CHECK_THROWS_AS(build_chain(3, {ok}, pi), NonPositivePi);  // length mismatch
  }
  SUBCASE("bad edges") {
    EdgeSpec self = ok;
    self.y = 0;
    CHECK_THROWS_AS(build_chain(2, {self}, pi), NonPositiveInput);
    EdgeSpec range = ok;
    range.y = 5;
    CHECK_THROWS_AS(build_chain(2, {range}, pi), NonPositiveInput);
    EdgeSpec negative = ok;
    negative.rate_xy = -1.0;
    CHECK_THROWS_AS(build_chain(2, {negative}, pi), NonPositiveInput);
    CHECK_THROWS_AS(build_chain(2, {ok, ok}, pi), NonPositiveInput);  // duplicate
  }
  SUBCASE("detailed balance") {
    EdgeSpec skew = ok;
    skew.rate_yx = 2.0;  // pi K asymmetric by a factor 2
    CHECK_THROWS_AS(build_chain(2, {skew}, pi), DetailedBalanceViolation);
  }
  SUBCASE("irreducibility") {
    // 3 states, only one edge: state 2 unreachable.
    CHECK_THROWS_AS(
        build_chain(3, {ok}, Eigen::Vector3d(0.25, 0.25, 0.5)),
        NotIrreducible);
    // An edge with zero rates does not connect its endpoints.
    EdgeSpec dead;
    dead.x = 1;
    dead.y = 2;
    dead.rate_xy = 0.0;
    dead.rate_yx = 0.0;
    CHECK_THROWS_AS(
        build_chain(3, {ok, dead}, Eigen::Vector3d(0.25, 0.25, 0.5)),
        NotIrreducible);
  }
}
