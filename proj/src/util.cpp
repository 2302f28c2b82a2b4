#include "mixbound/util.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

namespace mixbound {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64_next(s);
  s ^= 0x6a09e667f3bcc909ull * (stream_id + 1);
  std::uint64_t b = splitmix64_next(s);
  std::seed_seq seq{static_cast<unsigned>(a), static_cast<unsigned>(a >> 32),
                    static_cast<unsigned>(b), static_cast<unsigned>(b >> 32),
                    static_cast<unsigned>(stream_id),
                    static_cast<unsigned>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

double uniform_unit(std::mt19937_64& eng) {
  // 53 bits, in (0,1): never returns 0 (adds 0.5 before scaling).
  const std::uint64_t bits = eng() >> 11;
  return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_unit(eng_);
  const double u2 = uniform_unit(eng_);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double c = std::cos(2.0 * M_PI * u2);
  const double s = std::sin(2.0 * M_PI * u2);
  spare_ = r * s;
  has_spare_ = true;
  return r * c;
}

double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double normal_upper_tail(double x) {
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

Interval wilson_interval(long long successes, long long trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  if (v.size() % 2 == 1) return v[m];
  return 0.5 * (v[m - 1] + v[m]);
}

void Fnv1a64::update_bytes(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h_ ^= static_cast<std::uint64_t>(p[i]);
    h_ *= 1099511628211ull;
  }
}

void Fnv1a64::update(double x) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(x));
  std::memcpy(&bits, &x, sizeof(bits));
  update_bytes(&bits, sizeof(bits));
}

void Fnv1a64::update(std::uint64_t x) { update_bytes(&x, sizeof(x)); }

void Fnv1a64::update(std::int64_t x) { update_bytes(&x, sizeof(x)); }

void Fnv1a64::update(const std::string& s) { update_bytes(s.data(), s.size()); }

void Fnv1a64::update(const std::vector<double>& v) {
  for (double x : v) update(x);
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return std::string(buf);
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace mixbound
