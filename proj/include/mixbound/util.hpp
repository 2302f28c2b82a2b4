#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mixbound {

// ---------------------------------------------------------------------------
// deterministic RNG streams
// ---------------------------------------------------------------------------

// splitmix64 step; used to derive independent stream seeds from (seed, id).
std::uint64_t splitmix64_next(std::uint64_t& state);

// A mt19937_64 engine deterministically derived from (seed, stream_id).
// Different stream ids give statistically independent streams; the mapping is
// fixed so outputs are reproducible byte-for-byte.
std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id);

// Uniform double in (0,1) with 53 random bits, built directly from engine
// output (no distribution object, so the byte stream is portable).
double uniform_unit(std::mt19937_64& eng);

// Standard normal variates via Box-Muller on uniform_unit.  We avoid
// std::normal_distribution because its algorithm is implementation-defined,
// which would break byte-identical reruns across standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::mt19937_64 engine) : eng_(engine) {}
  double next();

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// numerics
// ---------------------------------------------------------------------------

// log(sum(exp(v))) computed stably; returns -inf for an empty vector.
double log_sum_exp(const std::vector<double>& v);

// log(e^a + e^b) computed stably; tolerates -inf arguments.
double log_add_exp(double a, double b);

// Standard normal upper tail P[Z > x] via erfc (double precision, stable for
// large |x|).
double normal_upper_tail(double x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Wilson score interval for a binomial proportion at normal quantile z.
Interval wilson_interval(long long successes, long long trials, double z);

// Median of a copy of v (average of middle two for even length).
double median(std::vector<double> v);

// ---------------------------------------------------------------------------
// hashing / digests
// ---------------------------------------------------------------------------

// FNV-1a 64-bit running digest over raw bytes.  Used to fingerprint inputs
// (energy tables, configs) so every report can state what it was computed
// from.  Not cryptographic; collisions are irrelevant for provenance tags.
class Fnv1a64 {
 public:
  void update_bytes(const void* data, std::size_t n);
  void update(double x);
  void update(std::uint64_t x);
  void update(std::int64_t x);
  void update(const std::string& s);
  void update(const std::vector<double>& v);
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 14695981039346656037ull;
};

std::string hex_digest(std::uint64_t h);

// Shortest exact decimal form used for all CSV numeric output ("%.17g").
std::string format_double(double x);

}  // namespace mixbound
