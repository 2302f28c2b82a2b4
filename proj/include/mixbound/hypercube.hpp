#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mixbound/path_bounds.hpp"

namespace mixbound {

// States of the N-spin hypercube are bitmasks in [0, 2^N); bit i flips spin
// site i (0-based).  The group product of two configurations is XOR.

// ---------------------------------------------------------------------------
// cyclic flip paths
// ---------------------------------------------------------------------------

struct HypercubePath {
  std::vector<std::uint32_t> vertices;
  int length() const { return static_cast<int>(vertices.size()) - 1; }
};

// Path from x to y flipping the disagreement sites in cyclic site order
// start_site, start_site+1, ..., N-1, 0, ..., start_site-1 (only sites where
// x and y disagree are flipped).  Length equals the Hamming distance; x == y
// yields the single-vertex path.
HypercubePath cyclic_flip_path(std::uint32_t x, std::uint32_t y, int start_site,
                               int N);

// Verifies that the Hamming-distance-many cyclic paths started at each
// disagreement site have pairwise disjoint interiors.
bool interior_disjointness_check(std::uint32_t x, std::uint32_t y, int N);

// ---------------------------------------------------------------------------
// good/bad classification
// ---------------------------------------------------------------------------

// Energy threshold for "good" configurations.  The two variants differ by a
// factor sqrt(2) under the square root; the proposition form
// sqrt((1+c_e) N log N) is the default because the downstream partition
// estimates match it.  Logs are natural.
enum class ThresholdVariant { proposition, text };

double good_threshold(int N, double c_e, ThresholdVariant variant);

class GoodBadClassification {
 public:
  GoodBadClassification(Eigen::VectorXd H, int N, double c_e,
                        ThresholdVariant variant);

  int N() const { return n_sites_; }
  double c_e() const { return c_e_; }
  ThresholdVariant variant() const { return variant_; }
  double threshold() const { return threshold_; }
  bool good(std::uint32_t state) const { return H_[state] <= threshold_; }
  long long bad_count() const;
  std::vector<int> good_states() const;
  std::vector<int> bad_states() const;
  const Eigen::VectorXd& H() const { return H_; }

 private:
  Eigen::VectorXd H_;
  int n_sites_ = 0;
  double c_e_ = 0.0;
  ThresholdVariant variant_ = ThresholdVariant::proposition;
  double threshold_ = 0.0;
};

GoodBadClassification classify(const Eigen::VectorXd& H, int N, double c_e,
                               ThresholdVariant variant = ThresholdVariant::proposition);

// ---------------------------------------------------------------------------
// selected path family
// ---------------------------------------------------------------------------

// Deterministic per-pair path selection on the hypercube:
//  * long pairs (Hamming distance >= N/log N): first interior-good cyclic
//    path by ascending disagreement-site index, else the first-site path as
//    a flagged fallback;
//  * short pairs: lexicographically first intermediate z that is good, with
//    ||x-z||, ||z-y|| >= N/log N, combined length <= N, whose first
//    interior-good legs x->z and z->y concatenate into a self-avoiding
//    path; else the first-site direct path as a flagged fallback.
// All selected paths have length <= N.  Paths are recomputed on the fly in
// visit(), so the family needs no per-pair storage.
class RemPathFamily final : public PathFamily {
 public:
  RemPathFamily(Eigen::VectorXd H, int N, double c_e,
                ThresholdVariant variant = ThresholdVariant::proposition);

  int num_states() const override { return 1 << n_sites_; }
  bool visit(int x, int y, const StepFn& step) const override;

  const GoodBadClassification& classification() const { return classification_; }
  int sites() const { return n_sites_; }
  double cut() const { return cut_; }  // N / log N

  struct Selection {
    bool composite = false;   // via intermediate z
    bool fallback = false;    // no admissible choice; first-site direct path
    std::uint32_t z = 0;
    int first_site = 0;       // cyclic start site of the (first) leg
    int second_site = 0;      // cyclic start site of the second leg
    int length = 0;
  };
  Selection select(std::uint32_t x, std::uint32_t y) const;

 private:
  GoodBadClassification classification_;
  int n_sites_ = 0;
  double cut_ = 0.0;
};

RemPathFamily select_paths(const Eigen::VectorXd& H, int N, double c_e,
                           ThresholdVariant variant = ThresholdVariant::proposition);

// ---------------------------------------------------------------------------
// certificate
// ---------------------------------------------------------------------------

// Aggregate over all ordered pairs:  fraction whose selected path has every
// interior vertex good, maximum path length, and fallback counters.  Used to
// estimate over disorder seeds how often the whole family is good.
struct PathCertificate {
  double all_interior_good_fraction = 0.0;
  int max_length = 0;
  long long total_pairs = 0;
  long long long_pairs = 0;
  long long short_pairs = 0;
  long long long_fallbacks = 0;
  long long short_fallbacks = 0;
  long long composite_pairs = 0;
  long long length_violations = 0;  // paths longer than N (never by construction)
};

PathCertificate good_path_certificate(const RemPathFamily& family);

}  // namespace mixbound
