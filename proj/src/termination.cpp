#include "prftps/termination.hpp"

#include <algorithm>
#include <string>

#include "prftps/error.hpp"

namespace prftps {

std::vector<TerminationState> termination_round(std::span<const TerminationState> states,
                                                const NeighborSets& nbrs, const std::vector<bool>& defect_found,
                                                std::uint64_t round) {
  const auto n = nbrs.size();
  if (states.size() != n || defect_found.size() != n)
    throw Error(ErrorCode::invalid_argument, "termination state size does not match graph");

  std::vector<TerminationState> next(states.begin(), states.end());
  for (std::size_t j = 0; j < n; ++j) {
    const auto& cur = states[j];
    auto& nxt = next[j];

    std::uint64_t theta = std::max(cur.theta, cur.count);
    for (auto i : nbrs.in[j]) theta = std::max({theta, states[i].theta, states[i].count});
    nxt.theta = theta;
    nxt.stability = (theta != cur.theta) ? 0 : cur.stability + 1;

    if (!cur.frozen_count && defect_found[j]) nxt.frozen_count = cur.count;
    nxt.count = nxt.frozen_count ? *nxt.frozen_count : cur.count + 1;

    if (!nxt.stop_round && nxt.frozen_count && nxt.stability >= *nxt.frozen_count) {
      nxt.stop_round = round + 1;
      nxt.stop_theta = nxt.theta;
    }
  }
  return next;
}

std::uint64_t compute_dmax(std::uint64_t stop, std::uint64_t degree) {
  const auto lead = 2 * degree + 2;
  if (stop < lead || (stop - lead) % 2 != 0 || (stop - lead) / 2 < 1)
    throw Error(ErrorCode::protocol_error, "D_max from stop index " + std::to_string(stop) + " and degree " +
                                               std::to_string(degree) + " is not a nonnegative integer");
  return (stop - lead) / 2 - 1;
}

std::uint64_t counter_clock(const TerminationState& s) {
  if (!s.stopped()) throw Error(ErrorCode::protocol_error, "node has not reached its stopping condition");
  return *s.stop_theta + *s.frozen_count;
}

}  // namespace prftps
