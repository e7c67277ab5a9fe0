#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "prftps/digraph.hpp"

namespace prftps {

// Per-node counters of the distributed stopping rule.
struct TerminationState {
  std::uint64_t count = 0;      // c_j, frozen once the node detects its defect
  std::uint64_t stability = 0;  // r_j, rounds since theta_j last changed
  std::uint64_t theta = 0;      // max-consensus value theta_j
  std::optional<std::uint64_t> frozen_count;  // c_j^o
  std::optional<std::uint64_t> stop_round;    // k_{j,t}: round at which r_j reached c_j^o
  std::optional<std::uint64_t> stop_theta;    // theta_j at that round

  bool stopped() const noexcept { return stop_round.has_value(); }
};

// Advances every node's counters from round k to k+1 (`round` = k).
// `defect_found[j]` reports whether node j has detected its defect at round
// k; the first such round freezes c_j at its current value. theta is
// updated from the round-k values of (theta_i, c_i) over N_j^- and j itself,
// and r_j resets whenever theta_j changes.
std::vector<TerminationState> termination_round(std::span<const TerminationState> states,
                                                const NeighborSets& nbrs, const std::vector<bool>& defect_found,
                                                std::uint64_t round);

// (stop - 2*degree - 2)/2 - 1; PROTOCOL_ERROR unless that is a nonnegative integer.
std::uint64_t compute_dmax(std::uint64_t stop, std::uint64_t degree);

// Stop index on the node's counter clock: theta_j + r_j once r_j has reached
// c_j^o. Equal to c^o_max + c_j^o, independent of where the node sits
// relative to the node holding the largest count.
std::uint64_t counter_clock(const TerminationState& s);

// First-stage length every node agrees on once it knows D_max.
constexpr std::uint64_t first_stage_rounds(std::uint64_t dmax) { return 4 * (dmax + 1); }

// Steady-stage round budget for t >= 1.
constexpr std::uint64_t steady_rounds(std::uint64_t dmax) { return dmax + 2; }

}  // namespace prftps
