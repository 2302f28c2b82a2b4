#include "mixbound/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "mixbound/errors.hpp"
#include "mixbound/util.hpp"

namespace mixbound {

namespace {
constexpr long long kMaxJumps = 10'000'000;
}

Trajectory simulate_trajectory(const ReversibleChain& chain, int start,
                               double t_max, std::mt19937_64& rng) {
  if (start < 0 || start >= chain.n()) {
    throw NonPositiveInput("simulate_trajectory: start state out of range");
  }
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw NonPositiveInput("simulate_trajectory: need finite t_max > 0");
  }
  Trajectory trajectory;
  trajectory.t_max = t_max;
  trajectory.times.push_back(0.0);
  trajectory.states.push_back(start);

  double t = 0.0;
  int x = start;
  while (true) {
    const double exit_rate = chain.total_rate(x);
    if (!(exit_rate > 0.0)) break;  // absorbing state: sit out the horizon
    const double hold = -std::log(uniform_unit(rng)) / exit_rate;
    t += hold;
    if (t >= t_max) break;
    // Pick the jump target with probability rate / exit_rate.
    double u = uniform_unit(rng) * exit_rate;
    int next = -1;
    for (auto it = chain.arcs_begin(x); it != chain.arcs_end(x); ++it) {
      u -= it->rate;
      next = it->to;
      if (u <= 0.0) break;
    }
    x = next;  // rounding can leave u slightly positive; the last arc absorbs it
    trajectory.times.push_back(t);
    trajectory.states.push_back(x);
    if (trajectory.num_jumps() > kMaxJumps) {
      throw CapExceeded("simulate_trajectory: more than " +
                        std::to_string(kMaxJumps) + " jumps before t_max");
    }
  }
  return trajectory;
}

int state_at(const Trajectory& trajectory, double t) {
  if (t < 0.0 || t > trajectory.t_max) {
    throw NonPositiveInput("state_at: time outside [0, t_max]");
  }
  const auto it = std::upper_bound(trajectory.times.begin(),
                                   trajectory.times.end(), t);
  const auto idx = static_cast<std::size_t>(it - trajectory.times.begin()) - 1;
  return trajectory.states[idx];
}

Eigen::VectorXd occupation_fractions(const Trajectory& trajectory,
                                     int n_states) {
  if (n_states < 1) {
    throw NonPositiveInput("occupation_fractions: need n_states >= 1");
  }
  Eigen::VectorXd fractions = Eigen::VectorXd::Zero(n_states);
  for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
    const double t0 = trajectory.times[i];
    const double t1 = (i + 1 < trajectory.times.size()) ? trajectory.times[i + 1]
                                                        : trajectory.t_max;
    const int s = trajectory.states[i];
    if (s < 0 || s >= n_states) {
      throw NonPositiveInput("occupation_fractions: state out of range");
    }
    fractions[s] += (t1 - t0) / trajectory.t_max;
  }
  return fractions;
}

}  // namespace mixbound
