#pragma once
// Continuous-time trajectories of a reversible chain: exponential holding
// times with the exact exit rates, jump targets proportional to the rates.

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mixbound/chain.hpp"

namespace mixbound {

struct Trajectory {
  // states[i] is occupied on [times[i], times[i+1]), the last state up to
  // t_max; times[0] == 0.
  std::vector<double> times;
  std::vector<int> states;
  double t_max = 0.0;

  int final_state() const { return states.back(); }
  long long num_jumps() const { return static_cast<long long>(states.size()) - 1; }
};

Trajectory simulate_trajectory(const ReversibleChain& chain, int start,
                               double t_max, std::mt19937_64& rng);

// State occupied at time t (0 <= t <= t_max).
int state_at(const Trajectory& trajectory, double t);

// Fraction of [0, t_max] spent in each state.
Eigen::VectorXd occupation_fractions(const Trajectory& trajectory, int n_states);

}  // namespace mixbound
