#include "mixbound/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mixbound/errors.hpp"
#include "mixbound/util.hpp"

namespace mixbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_p_range(ConstantFamily family, double p) {
  bool ok = false;
  switch (family) {
    case ConstantFamily::L:
    case ConstantFamily::L_eta:
    case ConstantFamily::K2:
      ok = p > 0.0 && p <= 1.0;
      break;
    case ConstantFamily::K:
      ok = p > 0.0 && p < 2.0;
      break;
    case ConstantFamily::Lambda:
      ok = p > 0.0 && p <= 2.0;
      break;
  }
  if (!ok) {
    throw NonPositiveInput(std::string("constant_ratio: p = ") +
                           std::to_string(p) + " outside the range of family " +
                           family_name(family));
  }
}

// Ratio of the centered witness; +inf when the denominator vanishes (used by
// the minimizer, which skips such witnesses).
double ratio_or_inf(const ReversibleChain& chain, ConstantFamily family,
                    double p, const Eigen::VectorXd& f,
                    const ProbabilityVector* eta) {
  const Eigen::VectorXd& pi = chain.pi();
  const double inf_norm = f.cwiseAbs().maxCoeff();
  if (inf_norm == 0.0) return kInf;
  const double energy = dirichlet_form(chain, f, f);
  switch (family) {
    case ConstantFamily::L: {
      const double den = pi.dot(f.cwiseAbs());
      if (den <= 0.0) return kInf;
      return energy * std::pow(inf_norm, (2.0 - 2.0 * p) / p) /
             std::pow(den, 2.0 / p);
    }
    case ConstantFamily::L_eta: {
      const double den = eta->vec().dot(f.cwiseAbs());
      if (den <= 0.0) return kInf;
      return energy * std::pow(inf_norm, (2.0 - 2.0 * p) / p) /
             std::pow(den, 2.0 / p);
    }
    case ConstantFamily::K: {
      const double den = pi.dot(f.cwiseAbs2());
      if (den <= 0.0) return kInf;
      return energy * std::pow(inf_norm, (4.0 - 2.0 * p) / p) /
             std::pow(den, 2.0 / p);
    }
    case ConstantFamily::Lambda: {
      const double den = pi.dot(f.cwiseAbs().array().pow(p).matrix());
      if (den <= 0.0) return kInf;
      return energy / std::pow(den, 2.0 / p);
    }
    case ConstantFamily::K2: {
      const double den = pi.dot(f.cwiseAbs());
      if (den <= 0.0) return kInf;
      const double second = pi.dot(f.cwiseAbs2());
      return energy * std::pow(second, (1.0 - p) / (2.0 * p)) /
             std::pow(den, (p + 1.0) / p);
    }
  }
  return kInf;
}

}  // namespace

const char* family_name(ConstantFamily family) {
  switch (family) {
    case ConstantFamily::L: return "L";
    case ConstantFamily::L_eta: return "L_eta";
    case ConstantFamily::K: return "K";
    case ConstantFamily::Lambda: return "Lambda";
    case ConstantFamily::K2: return "K2";
  }
  return "?";
}

double constant_ratio(const ReversibleChain& chain, ConstantFamily family,
                      double p, const Eigen::VectorXd& f,
                      const ProbabilityVector* eta) {
  check_p_range(family, p);
  if (f.size() != chain.n()) {
    throw NonPositiveInput("constant_ratio: f has size " +
                           std::to_string(f.size()) + ", chain has " +
                           std::to_string(chain.n()) + " states");
  }
  if (family == ConstantFamily::L_eta) {
    if (eta == nullptr || eta->size() != chain.n()) {
      throw NonPositiveInput("constant_ratio: family L_eta needs eta over the chain's states");
    }
  }
  const double inf_norm = f.cwiseAbs().maxCoeff();
  const double mean = chain.pi().dot(f);
  if (std::abs(mean) > 1e-10 * std::max(1.0, inf_norm)) {
    throw NotCentered("constant_ratio: pi(f) = " + std::to_string(mean) +
                      " is not 0 within 1e-10");
  }
  const double value = ratio_or_inf(chain, family, p, f, eta);
  if (!std::isfinite(value)) {
    throw ZeroDenominator(std::string("constant_ratio: denominator of family ") +
                          family_name(family) + " vanishes at this witness");
  }
  return value;
}

// -----------------------------------------------------------------------------
// minimization
// -----------------------------------------------------------------------------

namespace {

// Recenters and sup-normalizes a raw direction; returns false if degenerate.
bool project(const ReversibleChain& chain, Eigen::VectorXd& f) {
  f.array() -= chain.pi().dot(f);
  const double inf_norm = f.cwiseAbs().maxCoeff();
  if (!(inf_norm > 0.0) || !std::isfinite(inf_norm)) return false;
  f /= inf_norm;
  return true;
}

}  // namespace

FunctionalConstantEstimate minimize_constant(const ReversibleChain& chain,
                                             ConstantFamily family, double p,
                                             const ProbabilityVector* eta,
                                             const MinimizeBudget& budget) {
  check_p_range(family, p);
  if (family == ConstantFamily::L_eta &&
      (eta == nullptr || eta->size() != chain.n())) {
    throw NonPositiveInput("minimize_constant: family L_eta needs eta");
  }
  const int n = chain.n();

  FunctionalConstantEstimate est;
  est.family = family;
  est.p = p;

  SpectralOptions sopts = budget.spectral;
  sopts.want_eigenvector = budget.include_eigenvector_start;
  const SpectralResult spectral = spectral_gap(chain, sopts);
  est.gap = spectral.gap;
  switch (family) {
    case ConstantFamily::L:
    case ConstantFamily::K:
    case ConstantFamily::Lambda:
    case ConstantFamily::K2:
      // Each of these infima dominates the gap: the energy obeys
      // E >= gap * pi(f^2) for centered f, and the remaining norm factors are
      // controlled by power-mean inequalities at ||f||_inf = 1.
      est.lower_bound = spectral.gap;
      break;
    case ConstantFamily::L_eta:
      // Only the crude bound E >= gap * pi(f^2) >= gap * min_pi ||f||_inf^2
      // with eta(|f|) <= ||f||_inf survives for a general eta.
      est.lower_bound = spectral.gap * chain.min_pi();
      break;
  }

  const auto eval = [&](Eigen::VectorXd f) {
    if (!project(chain, f)) return std::make_pair(kInf, Eigen::VectorXd());
    return std::make_pair(ratio_or_inf(chain, family, p, f, eta), std::move(f));
  };

  est.upper_bound = kInf;
  const auto consider = [&](const Eigen::VectorXd& start) {
    auto [value, f] = eval(start);
    if (!std::isfinite(value)) return;
    if (value < est.upper_bound) {
      est.upper_bound = value;
      est.witness = f;
    }
    // Coordinate descent with a shrinking step ladder from the projected f.
    Eigen::VectorXd cur = f;
    double cur_value = value;
    static constexpr double kSteps[] = {0.5, 0.25, 0.1, 0.04, 0.015, 0.005};
    for (int pass = 0; pass < budget.max_passes; ++pass) {
      bool improved = false;
      for (int i = 0; i < n; ++i) {
        for (double step : kSteps) {
          bool moved = false;
          for (double dir : {1.0, -1.0}) {
            Eigen::VectorXd cand = cur;
            cand[i] += dir * step;
            auto [cand_value, cand_f] = eval(std::move(cand));
            if (cand_value < cur_value * (1.0 - 1e-12)) {
              cur = std::move(cand_f);
              cur_value = cand_value;
              improved = moved = true;
              break;
            }
          }
          if (moved) break;
        }
      }
      if (!improved) break;
    }
    if (cur_value < est.upper_bound) {
      est.upper_bound = cur_value;
      est.witness = cur;
    }
  };

  if (budget.include_eigenvector_start && spectral.phi.size() == n) {
    consider(spectral.phi);
  }
  for (int s = 0; s < budget.multistarts; ++s) {
    Eigen::VectorXd start(n);
    GaussianStream gauss(seeded_engine(budget.seed, 1 + s));
    for (int i = 0; i < n; ++i) start[i] = gauss.next();
    consider(start);
    // Dichotomy start: the sign pattern of the Gaussian draw.
    Eigen::VectorXd signs = start.unaryExpr([](double v) {
      return v >= 0.0 ? 1.0 : -1.0;
    });
    consider(signs);
  }

  if (!std::isfinite(est.upper_bound)) {
    // Pathological eta support; fall back to the best-effort witness e_0.
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
    e0[0] = 1.0;
    consider(e0);
  }
  return est;
}

// -----------------------------------------------------------------------------
// closed-form bounds
// -----------------------------------------------------------------------------

namespace {
void check_positive(double v, const char* name, const char* who) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw NonPositiveInput(std::string(who) + ": " + name +
                           " must be finite and > 0, got " + std::to_string(v));
  }
}
void check_pp(double p, double p_prime, const char* who) {
  if (!(p > 0.0 && p <= 1.0) || !(p_prime > 0.0 && p_prime <= 1.0)) {
    throw NonPositiveInput(std::string(who) + ": need p, p' in (0, 1], got p = " +
                           std::to_string(p) + ", p' = " + std::to_string(p_prime));
  }
}
}  // namespace

double decay_bound(double L_eta_lower, double L_lower, double p,
                   double p_prime, double t) {
  check_pp(p, p_prime, "decay_bound");
  check_positive(L_eta_lower, "L_eta_lower", "decay_bound");
  check_positive(L_lower, "L_lower", "decay_bound");
  check_positive(t, "t", "decay_bound");
  const double c =
      std::exp(-p_prime / 2.0) *
      std::pow(p / (2.0 - p), p * p_prime / (4.0 - 2.0 * p));
  return c * std::pow(L_eta_lower, -p_prime / 2.0) *
         std::pow(L_lower, -p * p_prime / (4.0 - 2.0 * p)) *
         std::pow(t, -p_prime / (2.0 - p));
}

double mixing_time_bound(double L_eta_lower, double L_lower, double p,
                         double p_prime, double epsilon) {
  check_pp(p, p_prime, "mixing_time_bound");
  check_positive(L_eta_lower, "L_eta_lower", "mixing_time_bound");
  check_positive(L_lower, "L_lower", "mixing_time_bound");
  check_positive(epsilon, "epsilon", "mixing_time_bound");
  const double c = std::exp(-(2.0 - p) / 2.0) * std::pow(p / (2.0 - p), p / 2.0);
  return c * std::pow(L_eta_lower, -(2.0 - p) / 2.0) *
         std::pow(L_lower, -p / 2.0) *
         std::pow(epsilon, -(2.0 - p) / p_prime);
}

double log_mixing_time_bound(double log_inv_L_eta, double log_inv_L, double p,
                             double p_prime, double log_inv_epsilon) {
  check_pp(p, p_prime, "log_mixing_time_bound");
  const double log_c =
      -(2.0 - p) / 2.0 + (p / 2.0) * std::log(p / (2.0 - p));
  return log_c + (2.0 - p) / 2.0 * log_inv_L_eta + (p / 2.0) * log_inv_L +
         (2.0 - p) / p_prime * log_inv_epsilon;
}

double variance_decay_bound(double gap, double t, double pi_f_squared) {
  if (!(gap >= 0.0) || !(t >= 0.0) || !(pi_f_squared >= 0.0)) {
    throw NonPositiveInput("variance_decay_bound: need gap, t, pi(f^2) >= 0");
  }
  return std::exp(-2.0 * gap * t) * pi_f_squared;
}

double worst_case_tv_bound(double gap, double min_pi, double t) {
  if (!(gap >= 0.0) || !(min_pi > 0.0) || !(t >= 0.0)) {
    throw NonPositiveInput("worst_case_tv_bound: need gap, t >= 0 and min_pi > 0");
  }
  return std::sqrt(1.0 / min_pi) * std::exp(-gap * t);
}

double k_variance_decay_bound(double K_lower, double p, double t,
                              double f_inf_norm) {
  if (!(p > 0.0 && p < 2.0)) {
    throw NonPositiveInput("k_variance_decay_bound: need p in (0, 2)");
  }
  check_positive(K_lower, "K_lower", "k_variance_decay_bound");
  check_positive(t, "t", "k_variance_decay_bound");
  const double expo = -p / (2.0 - p);
  return std::pow((4.0 - 2.0 * p) / p, expo) * std::pow(K_lower * t, expo) *
         f_inf_norm * f_inf_norm;
}

// -----------------------------------------------------------------------------
// eigenvector concentration
// -----------------------------------------------------------------------------

ConcentrationReport eigenvector_concentration(const ReversibleChain& chain,
                                              double p, double p_prime,
                                              const SpectralOptions& opts) {
  if (!(p > 0.0 && p <= 1.0) || !(p_prime > 0.0) || !(p_prime < p)) {
    throw NonPositiveInput(
        "eigenvector_concentration: need 0 < p' < p <= 1, got p = " +
        std::to_string(p) + ", p' = " + std::to_string(p_prime));
  }
  SpectralOptions sopts = opts;
  sopts.want_eigenvector = true;
  const SpectralResult spectral = spectral_gap(chain, sopts);
  if (spectral.phi.size() != chain.n()) {
    throw EigensolverFailure("eigenvector_concentration: no eigenvector available");
  }
  // Normalize to pi(phi^2) = 1 after killing the roundoff constant component.
  Eigen::VectorXd phi = spectral.phi;
  phi.array() -= chain.pi().dot(phi);
  const double l2 = std::sqrt(chain.pi().dot(phi.cwiseAbs2()));
  if (!(l2 > 0.0)) {
    throw EigensolverFailure("eigenvector_concentration: degenerate eigenvector");
  }
  phi /= l2;

  ConcentrationReport report;
  report.p = p;
  report.p_prime = p_prime;
  report.eigenvalue = dirichlet_form(chain, phi, phi);
  report.pi_abs_phi = chain.pi().dot(phi.cwiseAbs());
  report.k2_ratio_at_phi =
      report.eigenvalue / std::pow(report.pi_abs_phi, (p + 1.0) / p);
  report.cauchy_schwarz_ok = report.pi_abs_phi <= 1.0 + 1e-12;

  MinimizeBudget budget;
  budget.multistarts = 4;
  budget.max_passes = 10;
  budget.spectral = opts;
  const FunctionalConstantEstimate l_est =
      minimize_constant(chain, ConstantFamily::L, p, nullptr, budget);
  report.l_over_L_upper =
      l_est.upper_bound > 0.0 ? report.eigenvalue / l_est.upper_bound : 0.0;
  return report;
}

}  // namespace mixbound
