#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "prftps/digraph.hpp"
#include "prftps/real.hpp"

namespace prftps {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------------------
// Baseline push-sum (value/mass pair, weights 1/(1+D_j^+)).

struct BaselineState {
  std::vector<double> value;  // x_{i,1}
  std::vector<double> mass;   // x_{i,2}
};

BaselineState baseline_start(std::span<const double> initial);
BaselineState baseline_push_sum_round(const BaselineState& state, const NeighborSets& nbrs);
std::vector<double> baseline_ratios(const BaselineState& state);

// ---------------------------------------------------------------------------
// State-decomposed push-sum.

enum class WeightPhase { initial, steady };

// Weights for one round. `p(i, j)` is the weight node j attaches to the
// alpha-substate it pushes to i (p_ij), so column j holds node j's outgoing
// weights including its self-weight p_jj.
struct WeightSet {
  WeightPhase phase = WeightPhase::steady;
  RealMatrix p;
  std::vector<Real> a_alpha_beta;  // a_i^{alpha,beta}
  std::vector<Real> a_beta_alpha;  // a_i^{beta,alpha}
  std::vector<Real> a_beta_beta;   // a_i^{beta,beta}

  std::size_t size() const noexcept { return a_beta_alpha.size(); }
};

// initial: p_ji(0) for j in N_i^+ and {i} drawn uniformly from [-range, range],
//          a_i^{beta,alpha}(0) set to the residual so each column sums to 1.
// steady:  1/(2+D_i^+) on N_i^+ and {i}, a^{beta,alpha}=1/(2+D_i^+),
//          a^{alpha,beta}=a^{beta,beta}=1/2. The generator is not touched.
WeightSet make_weights(const NeighborSets& nbrs, WeightPhase phase, Rng& rng, double range = 1.0);
WeightSet make_weights(const NeighborSets& nbrs, WeightPhase phase, std::uint64_t seed,
                       double range = 1.0);

// Largest |column sum - 1| over the 2n columns of the stacked matrix.
Real column_sum_defect(const WeightSet& w);

// Every node carries the same number of channels. A channel is one scalar
// iteration (l=1 component or the l=2 mass); channels evolve independently.
struct AgentState {
  std::vector<Real> alpha;
  std::vector<Real> beta;
  // alpha_history[c][k-1] = alpha-substate of channel c after round k (k >= 1).
  std::vector<std::vector<Real>> alpha_history;

  std::size_t channels() const noexcept { return alpha.size(); }
};

using NetworkState = std::vector<AgentState>;

// One synchronous round of the decomposed dynamics; appends the new
// alpha-substates to each node's history.
NetworkState decomposed_round(const NetworkState& states, const WeightSet& w, const NeighborSets& nbrs);

// Sum over nodes of alpha + beta for one channel (conserved by every round).
Real channel_total(const NetworkState& states, std::size_t channel);

// [[P, I/2], [Lambda, I/2]] with the alpha-block first. Steady weights only.
RealMatrix stacked_matrix(const WeightSet& w);

// Stack (alpha_1..alpha_n, beta_1..beta_n) of one channel.
RealVector stack_channel(const NetworkState& states, std::size_t channel);

}  // namespace prftps
