#include "mixbound/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "mixbound/util.hpp"

namespace mixbound {

Eigen::MatrixXd symmetrized_generator(const ReversibleChain& chain) {
  const int n = chain.n();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < chain.num_edges(); ++e) {
    const EdgeSpec& es = chain.edge(e);
    const double v = chain.conductance(e) /
                     std::sqrt(chain.pi()[es.x] * chain.pi()[es.y]);
    s(es.x, es.y) = v;
    s(es.y, es.x) = v;
  }
  for (int x = 0; x < n; ++x) s(x, x) = -chain.total_rate(x);
  return s;
}

namespace {

SpectralResult dense_path(const ReversibleChain& chain,
                          const SpectralOptions& opts) {
  const int n = chain.n();
  const Eigen::MatrixXd s = symmetrized_generator(chain);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.compute(s, opts.want_eigenvector ? Eigen::ComputeEigenvectors
                                      : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw EigensolverFailure("dense symmetric eigensolver did not converge");
  const Eigen::VectorXd& vals = es.eigenvalues();  // ascending
  SpectralResult r;
  r.method = "dense";
  if (n == 1) {
    r.gap = 0.0;
    r.lambda2 = 0.0;
    r.phi = Eigen::VectorXd::Zero(1);
    return r;
  }
  r.gap = -vals[n - 2];
  r.lambda2 = n >= 3 ? -vals[n - 3] : r.gap;
  if (opts.want_eigenvector) {
    Eigen::VectorXd v = es.eigenvectors().col(n - 2);
    Eigen::VectorXd sqrt_pi = chain.pi().cwiseSqrt();
    r.constant_overlap = std::abs(v.dot(sqrt_pi));
    r.residual = (s * v + r.gap * v).norm();
    Eigen::VectorXd phi = v.cwiseQuotient(sqrt_pi);
    const double m = phi.cwiseAbs().maxCoeff();
    if (m > 0) phi /= m;
    r.phi = phi;
  }
  return r;
}

// Lanczos on B^{-1} where B = -A + tau q q^T, q = sqrt(pi) (unit norm since
// sum pi = 1).  -A is PSD with one-dimensional kernel spanned by q, so B is
// positive definite with spectrum {tau} united with the nonzero spectrum of
// -A; the largest eigenvalue of B^{-1} restricted to {q}^perp is 1/gap.
SpectralResult lanczos_path(const ReversibleChain& chain,
                            const SpectralOptions& opts) {
  const int n = chain.n();
  Eigen::MatrixXd b = -symmetrized_generator(chain);
  // Gershgorin bound on the spectral radius of -A.
  double radius = 0.0;
  for (int x = 0; x < n; ++x) {
    double row = 0.0;
    for (int y = 0; y < n; ++y) row += std::abs(b(x, y));
    radius = std::max(radius, row);
  }
  const double tau = radius + 1.0;
  Eigen::VectorXd q = chain.pi().cwiseSqrt();
  b.selfadjointView<Eigen::Lower>().rankUpdate(q, tau);
  b.triangularView<Eigen::StrictlyUpper>() =
      b.triangularView<Eigen::StrictlyLower>().transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success)
    throw EigensolverFailure(
        "Cholesky factorization of the deflated negative generator failed");

  const auto apply = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::VectorXd w = v - q * q.dot(v);
    Eigen::VectorXd u = llt.solve(w);
    u -= q * q.dot(u);
    return u;
  };

  const int m_max = std::min(opts.max_iter, n - 1);
  std::vector<Eigen::VectorXd> basis;
  basis.reserve(m_max);
  std::vector<double> alpha, beta;  // tridiagonal entries

  std::mt19937_64 eng = seeded_engine(opts.seed, 0xabcd);
  Eigen::VectorXd v0(n);
  for (int i = 0; i < n; ++i) v0[i] = uniform_unit(eng) - 0.5;
  v0 -= q * q.dot(v0);
  v0.normalize();
  basis.push_back(v0);

  Eigen::VectorXd w;
  double theta = 0.0, theta2 = 0.0, res = 1.0;
  Eigen::VectorXd ritz_small;
  int m = 0;
  for (m = 1; m <= m_max; ++m) {
    w = apply(basis.back());
    const double a = basis.back().dot(w);
    alpha.push_back(a);
    w -= a * basis.back();
    if (m >= 2) w -= beta.back() * basis[m - 2];
    // full reorthogonalization (twice for safety)
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& vb : basis) w -= vb.dot(w) * vb;
    w -= q * q.dot(w);
    const double nb = w.norm();

    // Ritz values of the current tridiagonal.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = alpha[i];
    for (int i = 0; i + 1 < m; ++i) {
      t(i, i + 1) = beta[i];
      t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(t);
    theta = tes.eigenvalues()[m - 1];
    theta2 = m >= 2 ? tes.eigenvalues()[m - 2] : 0.0;
    ritz_small = tes.eigenvectors().col(m - 1);
    res = nb * std::abs(ritz_small[m - 1]);
    if (theta > 0 && res <= opts.tol * theta) break;
    if (nb < 1e-14) break;  // invariant subspace found
    beta.push_back(nb);
    basis.push_back(w / nb);
  }
  if (!(theta > 0))
    throw EigensolverFailure("Lanczos found no positive Ritz value");
  if (res > 1e-6 * theta)
    throw EigensolverFailure("Lanczos did not reach the residual target");

  SpectralResult r;
  r.method = "cholesky_lanczos";
  r.gap = 1.0 / theta;
  r.lambda2 = theta2 > 0 ? 1.0 / theta2 : r.gap;

  const int used = static_cast<int>(ritz_small.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < used && i < static_cast<int>(basis.size()); ++i)
    v += ritz_small[i] * basis[i];
  v -= q * q.dot(v);
  v.normalize();
  r.constant_overlap = std::abs(v.dot(q));
  // residual in the original symmetrized problem
  Eigen::MatrixXd neg_a = b;
  neg_a.selfadjointView<Eigen::Lower>().rankUpdate(q, -tau);
  neg_a.triangularView<Eigen::StrictlyUpper>() =
      neg_a.triangularView<Eigen::StrictlyLower>().transpose();
  r.residual = (neg_a * v - r.gap * v).norm();
  Eigen::VectorXd phi = v.cwiseQuotient(q);
  const double mx = phi.cwiseAbs().maxCoeff();
  if (mx > 0) phi /= mx;
  r.phi = phi;
  return r;
}

}  // namespace

SpectralResult spectral_gap(const ReversibleChain& chain,
                            const SpectralOptions& opts) {
  if (chain.n() <= opts.dense_cutoff) return dense_path(chain, opts);
  try {
    return lanczos_path(chain, opts);
  } catch (const EigensolverFailure&) {
    if (chain.n() <= 8192) return dense_path(chain, opts);
    throw;
  }
}

}  // namespace mixbound
