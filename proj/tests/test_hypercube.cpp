// Tests for hypercube path construction: cyclic flip paths, good/bad
// classification, and the deterministic per-pair path selection.
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "mixbound/errors.hpp"
#include "mixbound/hypercube.hpp"
#include "mixbound/util.hpp"

using namespace mixbound;

namespace {

// Replays a selected path via visit() and checks it is a genuine hypercube
// path from x to y: consecutive vertices differ in exactly one bit.
std::vector<std::uint32_t> replay(const RemPathFamily& fam, int x, int y) {
  std::vector<std::uint32_t> verts = {static_cast<std::uint32_t>(x)};
  const bool ok = fam.visit(x, y, [&](int u, int v) {
    REQUIRE(static_cast<std::uint32_t>(u) == verts.back());
    REQUIRE(std::popcount(static_cast<std::uint32_t>(u ^ v)) == 1);
    verts.push_back(static_cast<std::uint32_t>(v));
  });
  REQUIRE(ok);
  REQUIRE(verts.back() == static_cast<std::uint32_t>(y));
  return verts;
}

}  // namespace

TEST_CASE("cyclic flip path follows the cyclic site order") {
  // x = 0000, y = 0101: disagreement sites {0, 2}.
  const HypercubePath a = cyclic_flip_path(0b0000, 0b0101, 0, 4);
  REQUIRE(a.vertices == std::vector<std::uint32_t>{0b0000, 0b0001, 0b0101});
  CHECK(a.length() == 2);
  // Starting at site 1 wraps: 1, 2, 3, 0 flips site 2 first.
  const HypercubePath b = cyclic_flip_path(0b0000, 0b0101, 1, 4);
  REQUIRE(b.vertices == std::vector<std::uint32_t>{0b0000, 0b0100, 0b0101});
  // Degenerate pair: single-vertex path.
  const HypercubePath c = cyclic_flip_path(7, 7, 2, 3);
  REQUIRE(c.vertices == std::vector<std::uint32_t>{7});
  CHECK(c.length() == 0);
}

TEST_CASE("cyclic flip path length equals the Hamming distance") {
  std::mt19937_64 rng(90210u);
  for (int trial = 0; trial < 50; ++trial) {
    const int N = 2 + static_cast<int>(rng() % 9);
    const std::uint32_t mask = (1u << N) - 1u;
    const std::uint32_t x = static_cast<std::uint32_t>(rng()) & mask;
    const std::uint32_t y = static_cast<std::uint32_t>(rng()) & mask;
    const int s = static_cast<int>(rng() % N);
    const HypercubePath path = cyclic_flip_path(x, y, s, N);
    CHECK(path.length() == std::popcount(x ^ y));
    for (std::size_t i = 1; i < path.vertices.size(); ++i) {
      CHECK(std::popcount(path.vertices[i - 1] ^ path.vertices[i]) == 1);
    }
  }
}

TEST_CASE("cyclic flip path input validation") {
  CHECK_THROWS_AS(cyclic_flip_path(0, 1, 0, 0), NonPositiveInput);
  CHECK_THROWS_AS(cyclic_flip_path(0, 1, 0, 21), NonPositiveInput);
  CHECK_THROWS_AS(cyclic_flip_path(4, 1, 0, 2), NonPositiveInput);  // x out of range
  CHECK_THROWS_AS(cyclic_flip_path(0, 1, 2, 2), NonPositiveInput);  // bad site
  CHECK_THROWS_AS(cyclic_flip_path(0, 1, -1, 2), NonPositiveInput);
}

TEST_CASE("rotated cyclic paths have pairwise disjoint interiors") {
  std::mt19937_64 rng(5566u);
  for (int trial = 0; trial < 60; ++trial) {
    const int N = 2 + static_cast<int>(rng() % 9);
    const std::uint32_t mask = (1u << N) - 1u;
    const std::uint32_t x = static_cast<std::uint32_t>(rng()) & mask;
    const std::uint32_t y = static_cast<std::uint32_t>(rng()) & mask;
    // Interiors of distinct rotations are distinct arcs of the cyclic
    // disagreement order, so the check holds for every pair.
    CHECK(interior_disjointness_check(x, y, N));
  }
}

TEST_CASE("good thresholds: closed forms and the sqrt(2) variant gap") {
  const double prop = good_threshold(8, 1.0, ThresholdVariant::proposition);
  CHECK(prop == doctest::Approx(std::sqrt(2.0 * 8.0 * std::log(8.0))).epsilon(1e-14));
  const double text = good_threshold(8, 1.0, ThresholdVariant::text);
  CHECK(text == doctest::Approx(prop * std::sqrt(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(good_threshold(8, 0.0, ThresholdVariant::proposition),
                  NonPositiveInput);
  CHECK_THROWS_AS(good_threshold(0, 1.0, ThresholdVariant::proposition),
                  NonPositiveInput);
}

TEST_CASE("classification splits at the threshold") {
  const int N = 2;
  Eigen::VectorXd H(4);
  const double thr = good_threshold(N, 1.0, ThresholdVariant::proposition);
  H << -1.0, thr, thr + 0.5, 100.0;  // boundary state counts as good
  const GoodBadClassification cls = classify(H, N, 1.0);
  CHECK(cls.threshold() == thr);
  CHECK(cls.good(0));
  CHECK(cls.good(1));
  CHECK_FALSE(cls.good(2));
  CHECK_FALSE(cls.good(3));
  CHECK(cls.bad_count() == 2);
  CHECK(cls.good_states() == std::vector<int>{0, 1});
  CHECK(cls.bad_states() == std::vector<int>{2, 3});
  CHECK_THROWS_AS(classify(Eigen::VectorXd::Zero(3), 2, 1.0), NonPositiveInput);
}

TEST_CASE("selection invariants on random energies") {
  std::mt19937_64 rng(777u);
  for (int N : {4, 6, 8}) {
    const int n = 1 << N;
    Eigen::VectorXd H(n);
    GaussianStream gauss(seeded_engine(123, N));
    const double scale = std::sqrt(static_cast<double>(N));
    for (int i = 0; i < n; ++i) H[i] = scale * gauss.next();
    const RemPathFamily fam = select_paths(H, N, 1.0);
    const auto& cls = fam.classification();
    CHECK(fam.cut() == doctest::Approx(N / std::log(double(N))));
    for (int trial = 0; trial < 200; ++trial) {
      const int x = static_cast<int>(rng() % n);
      const int y = static_cast<int>(rng() % n);
      if (x == y) continue;
      const auto sel = fam.select(x, y);
      const auto sel2 = fam.select(x, y);  // deterministic
      CHECK(sel.composite == sel2.composite);
      CHECK(sel.fallback == sel2.fallback);
      CHECK(sel.z == sel2.z);
      CHECK(sel.first_site == sel2.first_site);
      const int h = std::popcount(static_cast<std::uint32_t>(x ^ y));
      const std::vector<std::uint32_t> verts = replay(fam, x, y);
      CHECK(static_cast<int>(verts.size()) - 1 == sel.length);
      CHECK(sel.length <= N);
      // Self-avoiding.
      std::set<std::uint32_t> seen(verts.begin(), verts.end());
      CHECK(seen.size() == verts.size());
      if (h >= fam.cut()) {
        // Long pair: single cyclic path, never composite.
        CHECK_FALSE(sel.composite);
        CHECK(sel.length == h);
        if (!sel.fallback) {
          for (std::size_t i = 1; i + 1 < verts.size(); ++i) {
            CHECK(cls.good(verts[i]));
          }
        } else {
          // Flagged fallback starts at the first disagreement site.
          CHECK(sel.first_site ==
                std::countr_zero(static_cast<std::uint32_t>(x ^ y)));
        }
      } else if (sel.composite) {
        // Short pair through an admissible intermediate z.
        const std::uint32_t z = sel.z;
        const int h1 = std::popcount(static_cast<std::uint32_t>(x) ^ z);
        const int h2 = std::popcount(z ^ static_cast<std::uint32_t>(y));
        CHECK(h1 >= fam.cut());
        CHECK(h2 >= fam.cut());
        CHECK(h1 + h2 <= N);
        CHECK(sel.length == h1 + h2);
        CHECK(cls.good(z));
        CHECK(std::find(verts.begin(), verts.end(), z) != verts.end());
      } else {
        CHECK(sel.fallback);
        CHECK(sel.length == h);
      }
    }
  }
}

TEST_CASE("small-N short pairs cannot split and always fall back") {
  // At N = 6 a composite needs both legs >= ceil(6 / log 6) = 4, but
  // 4 + 4 > 6, so every short pair takes the flagged direct path even when
  // every state is good.
  const int N = 6;
  const Eigen::VectorXd H = Eigen::VectorXd::Zero(1 << N);
  const RemPathFamily fam = select_paths(H, N, 1.0);
  const PathCertificate cert = good_path_certificate(fam);
  CHECK(cert.short_fallbacks == cert.short_pairs);
  CHECK(cert.composite_pairs == 0);
  CHECK(cert.long_fallbacks == 0);  // all states good
  CHECK(cert.all_interior_good_fraction == 1.0);
  CHECK(cert.length_violations == 0);
  CHECK(cert.total_pairs == (1LL << N) * ((1LL << N) - 1));
  CHECK(cert.long_pairs + cert.short_pairs == cert.total_pairs);
}

TEST_CASE("N = 8 distance-2 pairs admit a composite split") {
  // cut = 8 / log 8 ~ 3.85, so both legs need >= 4 sites.  |A| = |B| = 4
  // with |A xor B| = h forces |A and B| = 4 - h/2: integral only for even h,
  // and |A or B| = 4 + h/2 <= 8 holds.  Hence h = 2 splits, h = 1, 3 cannot.
  const int N = 8;
  const Eigen::VectorXd H = Eigen::VectorXd::Zero(1 << N);
  const RemPathFamily fam = select_paths(H, N, 1.0);
  CHECK(fam.select(0, 0b11).composite);        // h = 2
  CHECK(fam.select(0, 0b101000).composite);    // h = 2, other sites
  CHECK(fam.select(0, 0b1).fallback);          // h = 1
  CHECK(fam.select(0, 0b10101).fallback);      // h = 3
  const auto sel = fam.select(0, 0b11);
  CHECK(sel.length == 8);  // 4 + 4
  const PathCertificate cert = good_path_certificate(fam);
  CHECK(cert.composite_pairs > 0);
  CHECK(cert.composite_pairs + cert.short_fallbacks == cert.short_pairs);
  CHECK(cert.all_interior_good_fraction == 1.0);
}

TEST_CASE("certificate with all states bad") {
  // Only Hamming-distance-1 pairs have (vacuously good) empty interiors.
  const int N = 4;
  const int n = 1 << N;
  const Eigen::VectorXd H = Eigen::VectorXd::Constant(n, 1e6);
  const RemPathFamily fam = select_paths(H, N, 1.0);
  const PathCertificate cert = good_path_certificate(fam);
  const double expect =
      static_cast<double>(n) * N / static_cast<double>(cert.total_pairs);
  CHECK(cert.all_interior_good_fraction == doctest::Approx(expect).epsilon(1e-12));
  CHECK(cert.long_fallbacks > 0);
  CHECK(cert.short_fallbacks == cert.short_pairs);
}

TEST_CASE("family construction validation") {
  CHECK_THROWS_AS(select_paths(Eigen::VectorXd::Zero(2), 1, 1.0),
                  NonPositiveInput);
  CHECK_THROWS_AS(select_paths(Eigen::VectorXd::Zero(5), 2, 1.0),
                  NonPositiveInput);  // needs 2^N entries
}
