#include "mixbound/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mixbound/errors.hpp"

namespace mixbound {

namespace {

// -----------------------------------------------------------------------------
// truncated Poisson series with a certified geometric tail bound
// -----------------------------------------------------------------------------

struct PoissonSeries {
  std::vector<double> w;  // w[k] = e^{-m} m^k / k!
  double tail = 0.0;      // certified bound on 1 - sum(w)
};

PoissonSeries poisson_series(double mean, double tail_tol, std::size_t cap,
                             const char* who) {
  PoissonSeries series;
  if (mean <= 0.0) {
    series.w = {1.0};
    return series;
  }
  // For K+2 > m the terms decay at least geometrically with ratio m/(K+2),
  // so sum_{k>K} w_k <= w_{K+1} / (1 - m/(K+2)).
  const auto tail_bound = [mean](std::size_t K) {
    const double ratio = mean / (static_cast<double>(K) + 2.0);
    if (ratio >= 1.0) return 1.0;
    const double log_term = -mean + (static_cast<double>(K) + 1.0) * std::log(mean) -
                            std::lgamma(static_cast<double>(K) + 2.0);
    return std::exp(log_term) / (1.0 - ratio);
  };
  std::size_t K =
      static_cast<std::size_t>(mean + 12.0 * std::sqrt(mean + 1.0) + 20.0);
  while (tail_bound(K) > tail_tol) {
    if (K > cap) {
      throw CapExceeded(std::string(who) + ": Poisson truncation would need > " +
                        std::to_string(cap) + " terms (rate * t = " +
                        std::to_string(mean) + ")");
    }
    K += K / 4 + 8;
  }
  if (K > cap) {
    throw CapExceeded(std::string(who) + ": Poisson truncation would need > " +
                      std::to_string(cap) + " terms (rate * t = " +
                      std::to_string(mean) + ")");
  }
  series.w.resize(K + 1);
  const double log_mean = std::log(mean);
  for (std::size_t k = 0; k <= K; ++k) {
    series.w[k] = std::exp(-mean + static_cast<double>(k) * log_mean -
                           std::lgamma(static_cast<double>(k) + 1.0));
  }
  series.tail = tail_bound(K);
  return series;
}

// One application of the row-stochastic step W = I + G/Lambda to the rows of
// src (dst and src must be distinct).
void apply_step_matrix(const ReversibleChain& chain, double lambda,
                       const RowMatrix& src, RowMatrix& dst) {
  const int n = chain.n();
  for (int x = 0; x < n; ++x) {
    dst.row(x) = (1.0 - chain.total_rate(x) / lambda) * src.row(x);
    for (const auto* a = chain.arcs_begin(x); a != chain.arcs_end(x); ++a) {
      dst.row(x) += (a->rate / lambda) * src.row(a->to);
    }
  }
}

void apply_step_vector(const ReversibleChain& chain, double lambda,
                       const Eigen::VectorXd& src, Eigen::VectorXd& dst) {
  const int n = chain.n();
  for (int x = 0; x < n; ++x) {
    double v = (1.0 - chain.total_rate(x) / lambda) * src[x];
    for (const auto* a = chain.arcs_begin(x); a != chain.arcs_end(x); ++a) {
      v += (a->rate / lambda) * src[a->to];
    }
    dst[x] = v;
  }
}

// Adjoint step for measures: (mu W)_y.  Detailed balance gives the incoming
// rate K(x, y) = K(y, x) pi(y) / pi(x) from y's own arc list.
void apply_step_measure(const ReversibleChain& chain, double lambda,
                        const Eigen::VectorXd& src, Eigen::VectorXd& dst) {
  const int n = chain.n();
  const Eigen::VectorXd& pi = chain.pi();
  for (int y = 0; y < n; ++y) {
    double v = (1.0 - chain.total_rate(y) / lambda) * src[y];
    for (const auto* a = chain.arcs_begin(y); a != chain.arcs_end(y); ++a) {
      v += (a->rate * pi[y] / pi[a->to] / lambda) * src[a->to];
    }
    dst[y] = v;
  }
}

constexpr std::size_t kVectorTermCap = 5'000'000;
constexpr std::size_t kMatrixTermCap = 200'000;

void check_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw NonPositiveInput(std::string(who) + ": time must be finite and >= 0, got " +
                           std::to_string(t));
  }
}

}  // namespace

// -----------------------------------------------------------------------------
// semigroup action
// -----------------------------------------------------------------------------

Eigen::VectorXd semigroup_apply(const ReversibleChain& chain,
                                const Eigen::VectorXd& f, double t,
                                double tail_tol, UniformizationReport* report) {
  check_time(t, "semigroup_apply");
  if (f.size() != chain.n()) {
    throw NonPositiveInput("semigroup_apply: f has size " +
                           std::to_string(f.size()) + ", chain has " +
                           std::to_string(chain.n()) + " states");
  }
  const double lambda = chain.max_total_rate();
  const double mean = lambda * t;
  const PoissonSeries series =
      poisson_series(mean, tail_tol, kVectorTermCap, "semigroup_apply");
  if (report != nullptr) {
    report->rate = lambda;
    report->terms = static_cast<int>(series.w.size());
    report->tail_bound = series.tail;
  }
  Eigen::VectorXd cur = f;
  Eigen::VectorXd next(f.size());
  Eigen::VectorXd acc = series.w[0] * cur;
  for (std::size_t k = 1; k < series.w.size(); ++k) {
    apply_step_vector(chain, lambda, cur, next);
    cur.swap(next);
    acc += series.w[k] * cur;
  }
  return acc;
}

Eigen::VectorXd distribution_at(const ReversibleChain& chain,
                                const ProbabilityVector& mu, double t,
                                double tail_tol) {
  check_time(t, "distribution_at");
  if (mu.size() != chain.n()) {
    throw NonPositiveInput("distribution_at: mu has size " +
                           std::to_string(mu.size()) + ", chain has " +
                           std::to_string(chain.n()) + " states");
  }
  const double lambda = chain.max_total_rate();
  const PoissonSeries series = poisson_series(lambda * t, tail_tol,
                                              kVectorTermCap, "distribution_at");
  Eigen::VectorXd cur = mu.vec();
  Eigen::VectorXd next(cur.size());
  Eigen::VectorXd acc = series.w[0] * cur;
  for (std::size_t k = 1; k < series.w.size(); ++k) {
    apply_step_measure(chain, lambda, cur, next);
    cur.swap(next);
    acc += series.w[k] * cur;
  }
  return acc;
}

RowMatrix transition_matrix(const ReversibleChain& chain, double t,
                            double tail_tol, UniformizationReport* report) {
  check_time(t, "transition_matrix");
  const int n = chain.n();
  const double lambda = chain.max_total_rate();
  const PoissonSeries series = poisson_series(lambda * t, tail_tol,
                                              kMatrixTermCap, "transition_matrix");
  if (report != nullptr) {
    report->rate = lambda;
    report->terms = static_cast<int>(series.w.size());
    report->tail_bound = series.tail;
  }
  RowMatrix cur = RowMatrix::Identity(n, n);
  RowMatrix next(n, n);
  RowMatrix acc = series.w[0] * cur;
  for (std::size_t k = 1; k < series.w.size(); ++k) {
    apply_step_matrix(chain, lambda, cur, next);
    cur.swap(next);
    acc += series.w[k] * cur;
  }
  return acc;
}

double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) {
    throw NonPositiveInput("tv_distance: size mismatch " +
                           std::to_string(p.size()) + " vs " +
                           std::to_string(q.size()));
  }
  return 0.5 * (p - q).cwiseAbs().sum();
}

// -----------------------------------------------------------------------------
// envelopes
// -----------------------------------------------------------------------------

namespace {

// Certified bracket for m(t) = sup_{||f||_inf <= 1} sum_y eta(y) |P_t f(y) -
// pi(f)| from one dense transition matrix.
//
//   upper: per-row optimal test functions, sum_y eta_y ||P_t(y,.) - pi||_1;
//   lower: the single f0 = sign(eta P_t - pi), improved by coordinate ascent
//          on J(f) = sum_y eta_y |<P_t(y,.) - pi, f>| over {-1,1}^n.
//
// `slack` is a certified bound on the L1 row error of the computed matrix
// (Poisson truncation + float roundoff); it widens the bracket.
void envelope_point(const RowMatrix& matrix, const Eigen::VectorXd& pi,
                    const ProbabilityVector& eta, int passes, double slack,
                    double& lower_out, double& upper_out, double& row_err_out) {
  const int n = static_cast<int>(matrix.rows());
  std::vector<int> support;
  support.reserve(n);
  for (int y = 0; y < n; ++y) {
    if (eta[y] > 0.0) support.push_back(y);
  }

  double upper = 0.0;
  double row_err = 0.0;
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(n);  // (eta P_t - eta(1) pi)
  for (int y : support) {
    const auto row = matrix.row(y);
    upper += eta[y] * (row.transpose() - pi).cwiseAbs().sum();
    weighted += eta[y] * (row.transpose() - pi);
    row_err = std::max(row_err, std::abs(row.sum() - 1.0));
  }

  // f0 maximizes the linearization |<sum_y eta_y r_y, f>| = ||eta P_t - pi||_1
  // = 2 TV(eta P_t, pi); J(f0) itself can only be larger.
  Eigen::VectorXd f(n);
  for (int i = 0; i < n; ++i) f[i] = weighted[i] >= 0.0 ? 1.0 : -1.0;

  std::vector<double> g(support.size());
  const auto eval = [&](void) {
    double j = 0.0;
    for (std::size_t s = 0; s < support.size(); ++s) {
      const int y = support[s];
      g[s] = matrix.row(y).dot(f) - pi.dot(f);
      j += eta[y] * std::abs(g[s]);
    }
    return j;
  };
  double best = eval();

  // Coordinate ascent: J is convex, so its box maximum sits at a vertex and
  // single-coordinate improvements are exact given the cached inner products.
  for (int pass = 0; pass < passes; ++pass) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      const double step = -2.0 * f[i];
      double delta = 0.0;
      for (std::size_t s = 0; s < support.size(); ++s) {
        const int y = support[s];
        const double coeff = matrix(y, i) - pi[i];
        delta += eta[y] * (std::abs(g[s] + step * coeff) - std::abs(g[s]));
      }
      if (delta > 1e-15 * (1.0 + best)) {
        for (std::size_t s = 0; s < support.size(); ++s) {
          g[s] += step * (matrix(support[s], i) - pi[i]);
        }
        f[i] = -f[i];
        best += delta;
        improved = true;
      }
    }
    if (!improved) break;
  }
  // Re-evaluate from scratch so incremental updates cannot overstate J.
  best = eval();

  lower_out = std::max(0.0, best - slack);
  upper_out = upper + slack;
  row_err_out = row_err;
}

void finish_envelope(DecayEnvelope& env) {
  env.running_sup_upper.assign(env.upper.size(), 0.0);
  double sup = 0.0;
  for (std::size_t i = env.upper.size(); i-- > 0;) {
    sup = std::max(sup, env.upper[i]);
    env.running_sup_upper[i] = sup;
  }
}

}  // namespace

DecayEnvelope d_eta_envelope(const ReversibleChain& chain,
                             const ProbabilityVector& eta,
                             const std::vector<double>& grid,
                             const EnvelopeOptions& opts) {
  if (grid.empty()) throw EmptyGrid("d_eta_envelope: empty time grid");
  if (eta.size() != chain.n()) {
    throw NonPositiveInput("d_eta_envelope: eta has size " +
                           std::to_string(eta.size()) + ", chain has " +
                           std::to_string(chain.n()) + " states");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_time(grid[i], "d_eta_envelope");
    if (i > 0 && grid[i] < grid[i - 1]) {
      throw NonPositiveInput("d_eta_envelope: time grid must be ascending");
    }
  }
  DecayEnvelope env;
  env.time_grid = grid;
  env.lower.resize(grid.size());
  env.upper.resize(grid.size());
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    UniformizationReport rep;
    const RowMatrix matrix =
        transition_matrix(chain, grid[i], opts.tail_tol, &rep);
    const double slack =
        rep.tail_bound + static_cast<double>(rep.terms) * chain.n() * eps;
    double row_err = 0.0;
    envelope_point(matrix, chain.pi(), eta, opts.local_search_passes, slack,
                   env.lower[i], env.upper[i], row_err);
    env.max_row_sum_error = std::max(env.max_row_sum_error, row_err);
  }
  finish_envelope(env);
  return env;
}

DecayEnvelope d_eta_envelope_ladder(const ReversibleChain& chain,
                                    const ProbabilityVector& eta,
                                    const LadderOptions& opts) {
  if (opts.max_rungs < 1) throw EmptyGrid("d_eta_envelope_ladder: max_rungs < 1");
  if (!(opts.t0 > 0.0)) {
    throw NonPositiveInput("d_eta_envelope_ladder: t0 must be > 0");
  }
  if (eta.size() != chain.n()) {
    throw NonPositiveInput("d_eta_envelope_ladder: eta has size " +
                           std::to_string(eta.size()) + ", chain has " +
                           std::to_string(chain.n()) + " states");
  }
  const int n = chain.n();
  const double eps = std::numeric_limits<double>::epsilon();

  UniformizationReport rep;
  RowMatrix cur = transition_matrix(chain, opts.t0, opts.tail_tol, &rep);
  // L1 row error after k squarings of a base matrix with row error e0 obeys
  // err_k <= 2 err_{k-1} + n*eps  (products of row-substochastic matrices),
  // i.e. err_k <= 2^k e0 + (2^k - 1) n eps.
  const double base_err =
      rep.tail_bound + static_cast<double>(rep.terms) * n * eps;
  const double gemm_err = static_cast<double>(n) * eps;

  DecayEnvelope env;
  RowMatrix next(n, n);
  int below_count = 0;
  for (int k = 0; k < opts.max_rungs; ++k) {
    const double t = std::ldexp(opts.t0, k);
    const double slack =
        std::ldexp(base_err, k) + (std::ldexp(1.0, k) - 1.0) * gemm_err;
    double lo = 0.0, hi = 0.0, row_err = 0.0;
    envelope_point(cur, chain.pi(), eta, opts.local_search_passes, slack, lo,
                   hi, row_err);
    env.time_grid.push_back(t);
    env.lower.push_back(lo);
    env.upper.push_back(hi);
    env.max_row_sum_error = std::max(env.max_row_sum_error, row_err);
    if (opts.stop_epsilon > 0.0) {
      below_count = hi <= 0.5 * opts.stop_epsilon ? below_count + 1 : 0;
      if (below_count >= opts.stop_after) break;
    }
    if (k + 1 < opts.max_rungs) {
      next.noalias() = cur * cur;
      cur.swap(next);
    }
  }
  finish_envelope(env);
  return env;
}

EnvelopeBracket bracket_from_envelope(const DecayEnvelope& env,
                                      double epsilon) {
  EnvelopeBracket bracket;
  for (std::size_t i = 0; i < env.time_grid.size(); ++i) {
    if (!bracket.reached && env.running_sup_upper[i] <= epsilon) {
      bracket.t_hi = env.time_grid[i];
      bracket.reached = true;
    }
    if (env.lower[i] > epsilon) bracket.t_lo = env.time_grid[i];
  }
  return bracket;
}

// -----------------------------------------------------------------------------
// eps-crossing time with certified bisection refinement
// -----------------------------------------------------------------------------

TEtaBracket t_eta(const ReversibleChain& chain, const ProbabilityVector& eta,
                  double epsilon, const TEtaOptions& opts) {
  if (!(epsilon > 0.0)) {
    throw NonPositiveInput("t_eta: epsilon must be > 0, got " +
                           std::to_string(epsilon));
  }
  if (!(opts.t_min > 0.0) || !(opts.t_max > opts.t_min) ||
      !(opts.grid_ratio > 1.0)) {
    throw EmptyGrid("t_eta: need 0 < t_min < t_max and grid_ratio > 1");
  }

  std::vector<double> grid;
  for (double t = opts.t_min; t <= opts.t_max; t *= opts.grid_ratio) {
    grid.push_back(t);
  }
  if (grid.empty()) throw EmptyGrid("t_eta: empty geometric grid");

  TEtaBracket out;
  DecayEnvelope& env = out.envelope;
  env.lower.clear();
  const double eps_f = std::numeric_limits<double>::epsilon();

  const auto probe = [&](double t, double& lo, double& hi) {
    UniformizationReport rep;
    const RowMatrix matrix = transition_matrix(chain, t, opts.env.tail_tol, &rep);
    const double slack =
        rep.tail_bound + static_cast<double>(rep.terms) * chain.n() * eps_f;
    double row_err = 0.0;
    envelope_point(matrix, chain.pi(), eta, opts.env.local_search_passes, slack,
                   lo, hi, row_err);
    env.max_row_sum_error = std::max(env.max_row_sum_error, row_err);
    env.time_grid.push_back(t);
    env.lower.push_back(lo);
    env.upper.push_back(hi);
  };

  // Walk the geometric grid until some time certifies distance <= eps.
  double t_lo = 0.0;
  double t_hi = -1.0;
  for (double t : grid) {
    double lo = 0.0, hi = 0.0;
    probe(t, lo, hi);
    if (lo > epsilon) t_lo = t;
    if (hi <= epsilon) {
      t_hi = t;
      break;
    }
  }
  if (t_hi < 0.0) {
    throw NotReachedWithinHorizon(
        "t_eta: upper envelope stayed above epsilon = " +
        std::to_string(epsilon) + " up to t_max = " + std::to_string(opts.t_max));
  }

  // Bisect in log time while both sides stay certified; stop early if the
  // bracket hits the indeterminate zone (lower <= eps < upper at the probe).
  for (int it = 0; it < opts.max_refine; ++it) {
    if (t_lo > 0.0 && t_hi / t_lo - 1.0 <= opts.rel_tol) break;
    const double mid = t_lo > 0.0 ? std::sqrt(t_lo * t_hi) : 0.5 * t_hi;
    if (!(mid > 0.0) || mid <= t_lo || mid >= t_hi) break;
    double lo = 0.0, hi = 0.0;
    probe(mid, lo, hi);
    if (hi <= epsilon) {
      t_hi = mid;
    } else if (lo > epsilon) {
      t_lo = mid;
    } else {
      break;
    }
  }

  // Re-sort the probe log by time for downstream consumers.
  std::vector<std::size_t> order(env.time_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return env.time_grid[a] < env.time_grid[b];
  });
  DecayEnvelope sorted;
  sorted.max_row_sum_error = env.max_row_sum_error;
  for (std::size_t i : order) {
    sorted.time_grid.push_back(env.time_grid[i]);
    sorted.lower.push_back(env.lower[i]);
    sorted.upper.push_back(env.upper[i]);
  }
  finish_envelope(sorted);
  out.envelope = std::move(sorted);
  out.t_lo = t_lo;
  out.t_hi = t_hi;
  return out;
}

}  // namespace mixbound
