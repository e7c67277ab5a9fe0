#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "prftps/digraph.hpp"
#include "prftps/hankel.hpp"
#include "prftps/pushsum.hpp"
#include "prftps/real.hpp"
#include "prftps/termination.hpp"

namespace prftps {

struct SessionOptions {
  Real rank_tol = kDefaultRankTolerance;
  double weight_range = 1.0;  // k=0 weights drawn from [-weight_range, weight_range]
  double split_range = 1.0;   // alpha-substate split drawn from [-split_range, split_range]
  int max_attempts = 5;       // DEGENERATE / DIVIDE_BY_ZERO retries
  bool keep_record = false;   // store every round's substates (privacy audits)
};

// Channel 0 carries the l=2 mass iteration; channels 1..p carry the l=1
// iteration of each input component.
inline constexpr std::size_t kMassChannel = 0;

// Everything random about one run: the k=0 substate split and k=0 weights.
struct RunPlan {
  NetworkState initial;
  WeightSet initial_weights;
};

// inputs[node][component]
RunPlan draw_plan(const NeighborSets& nbrs, const std::vector<std::vector<Real>>& inputs, Rng& rng,
                  const SessionOptions& opts);

// Private value of node j, component c, encoded by a plan: (alpha + beta)/2.
Real encoded_input(const RunPlan& plan, std::size_t node, std::size_t component);

struct Snapshot {
  std::vector<std::vector<Real>> alpha;  // [node][channel]
  std::vector<std::vector<Real>> beta;
};

struct ExecutionRecord {
  RunPlan plan;
  WeightSet steady;
  std::vector<Snapshot> rounds;  // rounds[k] = substates at round k, k = 0..first-stage rounds
};

struct DiscoveryResult {
  std::vector<PolyCoefficients> poly;
  std::vector<std::uint64_t> detect_round;  // round at which node j froze its counter
  std::vector<std::uint64_t> local_stop;    // k_{j,t} in absolute rounds
  std::vector<std::uint64_t> node_dmax;     // D_max as computed by each node
  std::uint64_t dmax = 0;
  std::uint64_t rounds = 0;                 // measured first-stage rounds
  std::vector<std::vector<Real>> outputs;   // [node][component]
  std::optional<ExecutionRecord> record;
};

// t = 0 stage from a fixed plan: decomposed iteration + stopping rule until
// every node has stopped and the agreed first-stage length 4(D_max+1) is
// reached. Throws Error(degenerate | divide_by_zero | protocol_error).
DiscoveryResult run_discovery(const NeighborSets& nbrs, const RunPlan& plan, const SessionOptions& opts);

struct CachedResult {
  std::vector<std::vector<Real>> outputs;
  std::uint64_t rounds = 0;         // 1 + k_max
  std::uint64_t steady_rounds = 0;  // k_max
};

// t >= 1 stage: one k=0 round then k_max = D_max + 2 steady rounds, reusing beta.
CachedResult run_cached(const NeighborSets& nbrs, const RunPlan& plan, const std::vector<PolyCoefficients>& poly,
                        std::uint64_t dmax, const SessionOptions& opts);

struct StepResult {
  std::vector<std::vector<Real>> outputs;  // [node][component]
  std::uint64_t rounds = 0;
  int attempts = 0;

  std::vector<double> node_values(std::size_t component = 0) const;
};

// Algorithm state shared by all nodes of one network across optimization steps.
class Session {
 public:
  Session(DiGraph graph, std::uint64_t seed, SessionOptions opts = {});

  // inputs[node][component]; t = 0 runs discovery, t >= 1 reuses the cache.
  StepResult step(const std::vector<std::vector<Real>>& inputs, std::uint64_t t);
  StepResult step(const std::vector<std::vector<double>>& inputs, std::uint64_t t);
  StepResult step(const std::vector<double>& scalar_inputs, std::uint64_t t);

  bool has_cache() const noexcept { return discovery_.has_value(); }
  std::uint64_t dmax() const;
  std::uint64_t k_max() const { return steady_rounds(dmax()); }
  const DiscoveryResult& discovery() const;

  const DiGraph& graph() const noexcept { return graph_; }
  const NeighborSets& neighbors() const noexcept { return nbrs_; }
  const SessionOptions& options() const noexcept { return opts_; }

 private:
  DiGraph graph_;
  NeighborSets nbrs_;
  SessionOptions opts_;
  Rng rng_;
  std::optional<DiscoveryResult> discovery_;
};

}  // namespace prftps
