#include "mixbound/hypercube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mixbound/errors.hpp"

namespace mixbound {

namespace {

void check_sites(int N, const char* who) {
  if (N < 1 || N > 20) {
    throw NonPositiveInput(std::string(who) + ": need 1 <= N <= 20, got " +
                           std::to_string(N));
  }
}

void check_state(std::uint32_t s, int N, const char* who) {
  if (s >= (1u << N)) {
    throw NonPositiveInput(std::string(who) + ": state " + std::to_string(s) +
                           " out of range for N = " + std::to_string(N));
  }
}

// Applies fn(site) to the disagreement sites of x^y in cyclic order from
// start_site; fn returning false stops early.
template <typename Fn>
void for_cyclic_sites(std::uint32_t diff, int start_site, int N, Fn&& fn) {
  for (int k = 0; k < N; ++k) {
    const int site = (start_site + k) % N;
    if ((diff >> site) & 1u) {
      if (!fn(site)) return;
    }
  }
}

}  // namespace

HypercubePath cyclic_flip_path(std::uint32_t x, std::uint32_t y, int start_site,
                               int N) {
  check_sites(N, "cyclic_flip_path");
  check_state(x, N, "cyclic_flip_path");
  check_state(y, N, "cyclic_flip_path");
  if (start_site < 0 || start_site >= N) {
    throw NonPositiveInput("cyclic_flip_path: start_site " +
                           std::to_string(start_site) + " out of [0, " +
                           std::to_string(N) + ")");
  }
  HypercubePath path;
  path.vertices.reserve(std::popcount(x ^ y) + 1u);
  std::uint32_t cur = x;
  path.vertices.push_back(cur);
  for_cyclic_sites(x ^ y, start_site, N, [&](int site) {
    cur ^= 1u << site;
    path.vertices.push_back(cur);
    return true;
  });
  return path;
}

bool interior_disjointness_check(std::uint32_t x, std::uint32_t y, int N) {
  check_sites(N, "interior_disjointness_check");
  check_state(x, N, "interior_disjointness_check");
  check_state(y, N, "interior_disjointness_check");
  const std::uint32_t diff = x ^ y;
  std::vector<std::uint32_t> interiors;
  for (int site = 0; site < N; ++site) {
    if (!((diff >> site) & 1u)) continue;
    std::uint32_t cur = x;
    int emitted = 0;
    const int h = std::popcount(diff);
    for_cyclic_sites(diff, site, N, [&](int s) {
      cur ^= 1u << s;
      if (++emitted < h) interiors.push_back(cur);  // skip the endpoint y
      return true;
    });
  }
  std::sort(interiors.begin(), interiors.end());
  // A single path never repeats a vertex, so any duplicate is cross-path.
  return std::adjacent_find(interiors.begin(), interiors.end()) ==
         interiors.end();
}

// -----------------------------------------------------------------------------
// classification
// -----------------------------------------------------------------------------

double good_threshold(int N, double c_e, ThresholdVariant variant) {
  check_sites(N, "good_threshold");
  if (!(c_e > 0.0)) {
    throw NonPositiveInput("good_threshold: need c_e > 0, got " +
                           std::to_string(c_e));
  }
  const double scale = variant == ThresholdVariant::text ? 2.0 : 1.0;
  return std::sqrt((1.0 + c_e) * scale * N * std::log(static_cast<double>(N)));
}

GoodBadClassification::GoodBadClassification(Eigen::VectorXd H, int N,
                                             double c_e,
                                             ThresholdVariant variant)
    : H_(std::move(H)), n_sites_(N), c_e_(c_e), variant_(variant) {
  check_sites(N, "GoodBadClassification");
  if (H_.size() != (1 << N)) {
    throw NonPositiveInput("GoodBadClassification: H has " +
                           std::to_string(H_.size()) + " entries, expected 2^" +
                           std::to_string(N));
  }
  threshold_ = good_threshold(N, c_e, variant);
}

long long GoodBadClassification::bad_count() const {
  long long count = 0;
  for (Eigen::Index s = 0; s < H_.size(); ++s) {
    if (H_[s] > threshold_) ++count;
  }
  return count;
}

std::vector<int> GoodBadClassification::good_states() const {
  std::vector<int> out;
  for (Eigen::Index s = 0; s < H_.size(); ++s) {
    if (H_[s] <= threshold_) out.push_back(static_cast<int>(s));
  }
  return out;
}

std::vector<int> GoodBadClassification::bad_states() const {
  std::vector<int> out;
  for (Eigen::Index s = 0; s < H_.size(); ++s) {
    if (H_[s] > threshold_) out.push_back(static_cast<int>(s));
  }
  return out;
}

GoodBadClassification classify(const Eigen::VectorXd& H, int N, double c_e,
                               ThresholdVariant variant) {
  return GoodBadClassification(H, N, c_e, variant);
}

// -----------------------------------------------------------------------------
// selected family
// -----------------------------------------------------------------------------

RemPathFamily::RemPathFamily(Eigen::VectorXd H, int N, double c_e,
                             ThresholdVariant variant)
    : classification_(std::move(H), N, c_e, variant),
      n_sites_(N),
      cut_(static_cast<double>(N) / std::log(static_cast<double>(N))) {
  if (N < 2) {
    throw NonPositiveInput("RemPathFamily: need N >= 2 (N / log N undefined at N = 1)");
  }
}

namespace {

// True if every interior vertex of the cyclic path a -> b started at `site`
// is good.
bool interior_good(const GoodBadClassification& cls, std::uint32_t a,
                   std::uint32_t b, int site, int N) {
  const std::uint32_t diff = a ^ b;
  const int h = std::popcount(diff);
  std::uint32_t cur = a;
  int emitted = 0;
  bool ok = true;
  for_cyclic_sites(diff, site, N, [&](int s) {
    cur ^= 1u << s;
    if (++emitted < h && !cls.good(cur)) {
      ok = false;
      return false;
    }
    return true;
  });
  return ok;
}

// First disagreement site whose cyclic path has a good interior; -1 if none.
int first_good_site(const GoodBadClassification& cls, std::uint32_t a,
                    std::uint32_t b, int N) {
  const std::uint32_t diff = a ^ b;
  for (int site = 0; site < N; ++site) {
    if (!((diff >> site) & 1u)) continue;
    if (interior_good(cls, a, b, site, N)) return site;
  }
  return -1;
}

int first_site_of(std::uint32_t diff) { return std::countr_zero(diff); }

// Vertices of the composite x -> z -> y path, z listed once.
void composite_vertices(std::uint32_t x, std::uint32_t z, std::uint32_t y,
                        int site1, int site2, int N,
                        std::vector<std::uint32_t>& out) {
  out.clear();
  std::uint32_t cur = x;
  out.push_back(cur);
  for_cyclic_sites(x ^ z, site1, N, [&](int s) {
    cur ^= 1u << s;
    out.push_back(cur);
    return true;
  });
  for_cyclic_sites(z ^ y, site2, N, [&](int s) {
    cur ^= 1u << s;
    out.push_back(cur);
    return true;
  });
}

bool all_distinct(const std::vector<std::uint32_t>& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] == v[j]) return false;
    }
  }
  return true;
}

}  // namespace

RemPathFamily::Selection RemPathFamily::select(std::uint32_t x,
                                               std::uint32_t y) const {
  const int N = n_sites_;
  check_state(x, N, "RemPathFamily::select");
  check_state(y, N, "RemPathFamily::select");
  Selection sel;
  const std::uint32_t diff = x ^ y;
  const int h = std::popcount(diff);
  if (h == 0) return sel;
  sel.length = h;

  if (static_cast<double>(h) >= cut_) {
    const int site = first_good_site(classification_, x, y, N);
    if (site >= 0) {
      sel.first_site = site;
    } else {
      sel.first_site = first_site_of(diff);
      sel.fallback = true;
    }
    return sel;
  }

  // Short pair: lexicographic scan for an admissible intermediate z.
  const std::uint32_t n_states = 1u << N;
  std::vector<std::uint32_t> vertices;
  for (std::uint32_t z = 0; z < n_states; ++z) {
    const int h1 = std::popcount(x ^ z);
    if (static_cast<double>(h1) < cut_) continue;
    const int h2 = std::popcount(z ^ y);
    if (static_cast<double>(h2) < cut_) continue;
    if (h1 + h2 > N) continue;
    if (!classification_.good(z)) continue;
    const int site1 = first_good_site(classification_, x, z, N);
    if (site1 < 0) continue;
    const int site2 = first_good_site(classification_, z, y, N);
    if (site2 < 0) continue;
    composite_vertices(x, z, y, site1, site2, N, vertices);
    if (!all_distinct(vertices)) continue;
    sel.composite = true;
    sel.z = z;
    sel.first_site = site1;
    sel.second_site = site2;
    sel.length = h1 + h2;
    return sel;
  }
  sel.first_site = first_site_of(diff);
  sel.fallback = true;
  return sel;
}

bool RemPathFamily::visit(int x, int y, const StepFn& step) const {
  const auto ux = static_cast<std::uint32_t>(x);
  const auto uy = static_cast<std::uint32_t>(y);
  if (ux == uy) return true;
  const Selection sel = select(ux, uy);
  std::uint32_t cur = ux;
  const auto emit = [&](int site) {
    const std::uint32_t next = cur ^ (1u << site);
    step(static_cast<int>(cur), static_cast<int>(next));
    cur = next;
    return true;
  };
  if (sel.composite) {
    for_cyclic_sites(ux ^ sel.z, sel.first_site, n_sites_, emit);
    for_cyclic_sites(sel.z ^ uy, sel.second_site, n_sites_, emit);
  } else {
    for_cyclic_sites(ux ^ uy, sel.first_site, n_sites_, emit);
  }
  return true;
}

RemPathFamily select_paths(const Eigen::VectorXd& H, int N, double c_e,
                           ThresholdVariant variant) {
  return RemPathFamily(H, N, c_e, variant);
}

// -----------------------------------------------------------------------------
// certificate
// -----------------------------------------------------------------------------

PathCertificate good_path_certificate(const RemPathFamily& family) {
  const int N = family.sites();
  const std::uint32_t n_states = 1u << N;
  const GoodBadClassification& cls = family.classification();
  PathCertificate cert;
  long long good_pairs = 0;
  for (std::uint32_t x = 0; x < n_states; ++x) {
    for (std::uint32_t y = 0; y < n_states; ++y) {
      if (x == y) continue;
      ++cert.total_pairs;
      const RemPathFamily::Selection sel = family.select(x, y);
      const int h = std::popcount(x ^ y);
      const bool is_long = static_cast<double>(h) >= family.cut();
      if (is_long) {
        ++cert.long_pairs;
        if (sel.fallback) ++cert.long_fallbacks;
      } else {
        ++cert.short_pairs;
        if (sel.fallback) ++cert.short_fallbacks;
      }
      if (sel.composite) ++cert.composite_pairs;
      cert.max_length = std::max(cert.max_length, sel.length);
      if (sel.length > N) ++cert.length_violations;

      bool all_good;
      if (!sel.fallback) {
        // Selection only accepts interior-good legs and a good junction.
        all_good = true;
      } else if (is_long) {
        // Every cyclic candidate was already rejected.
        all_good = false;
      } else {
        all_good = interior_good(cls, x, y, sel.first_site, N);
      }
      if (all_good) ++good_pairs;
    }
  }
  cert.all_interior_good_fraction =
      cert.total_pairs > 0
          ? static_cast<double>(good_pairs) / static_cast<double>(cert.total_pairs)
          : 1.0;
  return cert;
}

}  // namespace mixbound
