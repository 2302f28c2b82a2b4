#include "mixbound/environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "mixbound/errors.hpp"
#include "mixbound/semigroup.hpp"

namespace mixbound {

namespace {

constexpr int kMaxTranslatedSites = 10;
const double kNan = std::numeric_limits<double>::quiet_NaN();

RemInstance shifted_instance(const RemInstance& instance, std::uint32_t sigma) {
  RemInstance shifted = instance;
  shifted.H = act(sigma, instance.H);
  return shifted;
}

struct MeanCi {
  double mean = 0.0;
  Interval ci{0.0, 0.0};
};

// Normal-approximation confidence interval at z = 1.96.
MeanCi mean_ci(const std::vector<double>& samples) {
  MeanCi out;
  const auto n = static_cast<double>(samples.size());
  for (double v : samples) out.mean += v;
  out.mean /= n;
  double ss = 0.0;
  for (double v : samples) ss += (v - out.mean) * (v - out.mean);
  const double se = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  out.ci = {out.mean - 1.96 * se, out.mean + 1.96 * se};
  return out;
}

}  // namespace

Eigen::VectorXd act(std::uint32_t sigma, const Eigen::VectorXd& H) {
  const auto n = static_cast<std::uint64_t>(H.size());
  if (n == 0 || (n & (n - 1)) != 0) {
    throw NonPositiveInput("act: landscape length must be a power of two");
  }
  if (sigma >= n) {
    throw NonPositiveInput("act: group element out of range");
  }
  Eigen::VectorXd out(H.size());
  for (std::uint64_t x = 0; x < n; ++x) {
    out[static_cast<Eigen::Index>(x)] =
        H[static_cast<Eigen::Index>(x ^ sigma)];
  }
  return out;
}

// -----------------------------------------------------------------------------
// pushforward law
// -----------------------------------------------------------------------------

EnvironmentLaw nu_measure(const RemInstance& instance) {
  if (instance.N > 14) {
    throw CapExceeded("nu_measure: N > 14 enumerates 4^N landscape entries");
  }
  const ProbabilityVector pi = gibbs_measure(instance);
  const std::uint32_t n = 1u << instance.N;
  EnvironmentLaw law;
  law.base_digest = instance.content_digest;

  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  std::vector<Eigen::VectorXd> atoms;
  for (std::uint32_t sigma = 0; sigma < n; ++sigma) {
    Eigen::VectorXd shifted = act(sigma, instance.H);
    Fnv1a64 hash;
    for (Eigen::Index i = 0; i < shifted.size(); ++i) hash.update(shifted[i]);
    const std::uint64_t key = hash.digest();
    bool found = false;
    for (std::size_t idx : buckets[key]) {
      if (atoms[idx] == shifted) {  // verify: equal hashes may still differ
        law.weights[idx] += pi[static_cast<int>(sigma)];
        ++law.merged;
        found = true;
        break;
      }
    }
    if (!found) {
      buckets[key].push_back(atoms.size());
      atoms.push_back(std::move(shifted));
      law.representatives.push_back(sigma);
      law.weights.push_back(pi[static_cast<int>(sigma)]);
    }
  }
  return law;
}

// -----------------------------------------------------------------------------
// shift lemma
// -----------------------------------------------------------------------------

ShiftLemmaReport shift_lemma_check(const RemInstance& instance,
                                   std::uint32_t sigma, double t) {
  if (instance.N > kMaxTranslatedSites) {
    throw CapExceeded("shift_lemma_check: N > " +
                      std::to_string(kMaxTranslatedSites));
  }
  const std::uint32_t n = 1u << instance.N;
  if (sigma >= n) throw NonPositiveInput("shift_lemma_check: sigma out of range");

  ShiftLemmaReport report;
  report.sigma = sigma;
  report.t = t;

  const ReversibleChain chain_base = metropolis_chain(instance);
  const ReversibleChain chain_shift =
      metropolis_chain(shifted_instance(instance, sigma));
  const Eigen::VectorXd& H = instance.H;

  // One-time marginals at t.
  const RowMatrix P_base = transition_matrix(chain_base, t);
  const RowMatrix P_shift = transition_matrix(chain_shift, t);
  for (std::uint32_t a = 0; a < n; ++a) {
    double lhs = 0.0;
    double rhs = 0.0;
    for (std::uint32_t x = 0; x < n; ++x) {
      lhs += P_base(sigma, x) * H[x ^ a];
      rhs += P_shift(0, x) * H[sigma ^ x ^ a];
    }
    report.scale = std::max(report.scale, std::abs(lhs));
    report.max_one_time_error =
        std::max(report.max_one_time_error, std::abs(lhs - rhs));
  }

  // Two-time correlations at (t/2, t) via the Markov property: one half-step
  // matrix reused for both legs.
  const RowMatrix Ph_base = transition_matrix(chain_base, t / 2.0);
  const RowMatrix Ph_shift = transition_matrix(chain_shift, t / 2.0);
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) {
      double lhs = 0.0;
      double rhs = 0.0;
      for (std::uint32_t x = 0; x < n; ++x) {
        double inner_l = 0.0;
        double inner_r = 0.0;
        for (std::uint32_t y = 0; y < n; ++y) {
          inner_l += Ph_base(x, y) * H[y ^ b];
          inner_r += Ph_shift(x, y) * H[sigma ^ y ^ b];
        }
        lhs += Ph_base(sigma, x) * H[x ^ a] * inner_l;
        rhs += Ph_shift(0, x) * H[sigma ^ x ^ a] * inner_r;
      }
      report.scale = std::max(report.scale, std::abs(lhs));
      report.max_two_time_error =
          std::max(report.max_two_time_error, std::abs(lhs - rhs));
    }
  }
  report.holds =
      report.max_one_time_error <= 1e-10 * report.scale &&
      report.max_two_time_error <= 1e-10 * report.scale;
  return report;
}

// -----------------------------------------------------------------------------
// invariance and reversibility of the stationary environment
// -----------------------------------------------------------------------------

InvarianceReport invariance_reversibility_check(const RemInstance& instance,
                                                double t) {
  if (instance.N > kMaxTranslatedSites) {
    throw CapExceeded("invariance_reversibility_check: N > " +
                      std::to_string(kMaxTranslatedSites));
  }
  const std::uint32_t n = 1u << instance.N;
  const ProbabilityVector pi = gibbs_measure(instance);
  const Eigen::VectorXd& H = instance.H;

  InvarianceReport report;
  report.t = t;

  // For each start sigma, row 0 of the translated chain's transition matrix.
  std::vector<Eigen::VectorXd> rows(n);
  for (std::uint32_t sigma = 0; sigma < n; ++sigma) {
    const ReversibleChain chain =
        metropolis_chain(shifted_instance(instance, sigma));
    rows[sigma] = transition_matrix(chain, t).row(0);
  }

  // Invariance of each evaluation functional.
  for (std::uint32_t a = 0; a < n; ++a) {
    double lhs = 0.0;  // E_nu[phi_a(env_t)]
    double rhs = 0.0;  // nu(phi_a)
    for (std::uint32_t sigma = 0; sigma < n; ++sigma) {
      double inner = 0.0;
      for (std::uint32_t x = 0; x < n; ++x) {
        inner += rows[sigma][x] * H[sigma ^ x ^ a];
      }
      lhs += pi[static_cast<int>(sigma)] * inner;
      rhs += pi[static_cast<int>(sigma)] * H[sigma ^ a];
    }
    report.scale = std::max(report.scale, std::abs(rhs));
    report.max_invariance_error =
        std::max(report.max_invariance_error, std::abs(lhs - rhs));
  }

  // Stationary two-point matrix M_ab = E_nu[phi_a(env_0) phi_b(env_t)].
  Eigen::MatrixXd M(n, n);
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = 0; b < n; ++b) {
      double sum = 0.0;
      for (std::uint32_t sigma = 0; sigma < n; ++sigma) {
        double inner = 0.0;
        for (std::uint32_t x = 0; x < n; ++x) {
          inner += rows[sigma][x] * H[sigma ^ x ^ b];
        }
        sum += pi[static_cast<int>(sigma)] * H[sigma ^ a] * inner;
      }
      M(a, b) = sum;
      report.scale = std::max(report.scale, std::abs(sum));
    }
  }
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      report.max_symmetry_error =
          std::max(report.max_symmetry_error, std::abs(M(a, b) - M(b, a)));
    }
  }
  report.holds =
      report.max_invariance_error <= 1e-10 * report.scale &&
      report.max_symmetry_error <= 1e-10 * report.scale;
  return report;
}

// -----------------------------------------------------------------------------
// start-point independence
// -----------------------------------------------------------------------------

SigmaIndependenceReport sigma_independence_check(int N, double beta, double t,
                                                 int num_seeds,
                                                 std::uint64_t base_seed) {
  if (N < 1 || N > kMaxTranslatedSites) {
    throw NonPositiveInput("sigma_independence_check: N out of range");
  }
  if (num_seeds < 2) {
    throw NonPositiveInput("sigma_independence_check: need at least 2 seeds");
  }
  const std::uint32_t n = 1u << N;
  SigmaIndependenceReport report;
  report.N = N;
  report.beta = beta;
  report.t = t;
  report.num_seeds = num_seeds;

  std::vector<std::vector<double>> samples(n);
  for (int s = 0; s < num_seeds; ++s) {
    Fnv1a64 mix;
    mix.update(base_seed);
    mix.update(static_cast<std::int64_t>(N));
    mix.update(static_cast<std::int64_t>(s));
    const RemInstance instance = sample_instance(N, beta, mix.digest());
    const ReversibleChain chain = metropolis_chain(instance);
    const RowMatrix P = transition_matrix(chain, t);
    Eigen::VectorXd phi(n);
    for (std::uint32_t x = 0; x < n; ++x) {
      phi[x] = std::tanh(beta * instance.H[x]);
    }
    for (std::uint32_t sigma = 0; sigma < n; ++sigma) {
      samples[sigma].push_back(P.row(sigma).dot(phi));
    }
  }

  report.max_lo = -std::numeric_limits<double>::infinity();
  report.min_hi = std::numeric_limits<double>::infinity();
  for (std::uint32_t sigma = 0; sigma < n; ++sigma) {
    const MeanCi mc = mean_ci(samples[sigma]);
    report.means.push_back(mc.mean);
    report.intervals.push_back(mc.ci);
    report.max_lo = std::max(report.max_lo, mc.ci.lo);
    report.min_hi = std::min(report.min_hi, mc.ci.hi);
  }
  report.all_overlap = report.max_lo <= report.min_hi;
  return report;
}

// -----------------------------------------------------------------------------
// averaged mixing time
// -----------------------------------------------------------------------------

TAvReport t_av_estimate(int N, double beta, double epsilon, int num_seeds,
                        const std::vector<double>& time_grid,
                        std::uint64_t base_seed) {
  if (num_seeds < 1) throw NonPositiveInput("t_av_estimate: need seeds >= 1");
  if (!(epsilon > 0.0)) throw NonPositiveInput("t_av_estimate: need epsilon > 0");
  TAvReport report;
  report.N = N;
  report.beta = beta;
  report.epsilon = epsilon;
  report.num_seeds = num_seeds;

  std::vector<double> reached_times;
  for (int s = 0; s < num_seeds; ++s) {
    Fnv1a64 mix;
    mix.update(base_seed);
    mix.update(static_cast<std::int64_t>(N));
    mix.update(static_cast<std::int64_t>(s));
    const RemInstance instance = sample_instance(N, beta, mix.digest());
    const ReversibleChain chain = metropolis_chain(instance);
    const DecayEnvelope envelope = d_eta_envelope(
        chain, ProbabilityVector::uniform(chain.n()), time_grid);
    const EnvelopeBracket bracket = bracket_from_envelope(envelope, epsilon);
    if (bracket.reached) {
      report.upper_times.push_back(bracket.t_hi);
      reached_times.push_back(bracket.t_hi);
    } else {
      report.upper_times.push_back(kNan);
    }
  }
  report.reached_count = static_cast<int>(reached_times.size());
  report.insufficient_seeds = report.reached_count < 30;
  if (!reached_times.empty()) {
    const MeanCi mc = mean_ci(reached_times);
    report.mean = mc.mean;
    report.ci = mc.ci;
  }
  return report;
}

}  // namespace mixbound
