#include "prftps/prftps.hpp"

#include <algorithm>
#include <string>

#include "prftps/error.hpp"

namespace prftps {

namespace {

NetworkState fresh_state(std::size_t n, std::size_t channels) {
  AgentState a;
  a.alpha.assign(channels, Real(0));
  a.beta.assign(channels, Real(0));
  a.alpha_history.assign(channels, {});
  return NetworkState(n, a);
}

std::size_t components_of(const RunPlan& plan) {
  if (plan.initial.empty() || plan.initial[0].channels() < 2)
    throw Error(ErrorCode::invalid_argument, "run plan needs a mass channel and at least one value channel");
  return plan.initial[0].channels() - 1;
}

Snapshot snapshot(const NetworkState& states) {
  Snapshot s;
  s.alpha.reserve(states.size());
  s.beta.reserve(states.size());
  for (const auto& a : states) {
    s.alpha.push_back(a.alpha);
    s.beta.push_back(a.beta);
  }
  return s;
}

std::vector<std::vector<Real>> node_outputs(const NetworkState& states, const std::vector<PolyCoefficients>& poly,
                                            std::size_t components, const Real& tol) {
  std::vector<std::vector<Real>> out(states.size(), std::vector<Real>(components));
  for (std::size_t j = 0; j < states.size(); ++j) {
    const auto& mass = states[j].alpha_history[kMassChannel];
    for (std::size_t c = 0; c < components; ++c)
      out[j][c] = final_value(states[j].alpha_history[c + 1], mass, poly[j], tol);
  }
  return out;
}

}  // namespace

RunPlan draw_plan(const NeighborSets& nbrs, const std::vector<std::vector<Real>>& inputs, Rng& rng,
                  const SessionOptions& opts) {
  const auto n = nbrs.size();
  if (inputs.size() != n) throw Error(ErrorCode::invalid_argument, "one input vector per node required");
  const auto components = inputs.empty() ? 0 : inputs[0].size();
  if (components == 0) throw Error(ErrorCode::invalid_argument, "inputs must have at least one component");
  for (const auto& v : inputs)
    if (v.size() != components) throw Error(ErrorCode::invalid_argument, "inputs must share one dimension");
  if (!(opts.split_range > 0.0)) throw Error(ErrorCode::invalid_argument, "split range must be positive");

  RunPlan plan;
  plan.initial = fresh_state(n, components + 1);
  std::uniform_real_distribution<double> split(-opts.split_range, opts.split_range);
  for (std::size_t i = 0; i < n; ++i) {
    auto& a = plan.initial[i];
    a.alpha[kMassChannel] = 0;
    a.beta[kMassChannel] = 2;
    for (std::size_t c = 0; c < components; ++c) {
      a.alpha[c + 1] = Real(split(rng));
      a.beta[c + 1] = 2 * inputs[i][c] - a.alpha[c + 1];
    }
  }
  plan.initial_weights = make_weights(nbrs, WeightPhase::initial, rng, opts.weight_range);
  return plan;
}

Real encoded_input(const RunPlan& plan, std::size_t node, std::size_t component) {
  const auto& a = plan.initial.at(node);
  return (a.alpha.at(component + 1) + a.beta.at(component + 1)) / 2;
}

DiscoveryResult run_discovery(const NeighborSets& nbrs, const RunPlan& plan, const SessionOptions& opts) {
  const auto n = nbrs.size();
  const auto components = components_of(plan);
  if (plan.initial.size() != n || plan.initial_weights.size() != n ||
      plan.initial_weights.phase != WeightPhase::initial)
    throw Error(ErrorCode::invalid_argument, "run plan does not match the graph");

  const auto steady = make_weights(nbrs, WeightPhase::steady, std::uint64_t{0});
  const std::uint64_t round_limit = 16 * n + 64;

  DiscoveryResult result;
  result.detect_round.assign(n, 0);
  result.local_stop.assign(n, 0);
  result.node_dmax.assign(n, 0);
  std::vector<std::optional<PolyCoefficients>> poly(n);
  std::vector<TerminationState> counters(n);

  if (opts.keep_record) result.record = ExecutionRecord{plan, steady, {}};

  NetworkState states = plan.initial;
  if (result.record) result.record->rounds.push_back(snapshot(states));

  // k = 0: private weights; no node holds samples yet.
  counters = termination_round(counters, nbrs, std::vector<bool>(n, false), 0);
  states = decomposed_round(states, plan.initial_weights, nbrs);
  std::uint64_t k = 1;
  if (result.record) result.record->rounds.push_back(snapshot(states));

  std::vector<bool> flags(n, false);
  for (;;) {
    // Round-k detection: dimension d is tested once 2d+1 samples are held.
    for (std::size_t j = 0; j < n; ++j) {
      flags[j] = false;
      if (poly[j] || k < samples_for_dimension(1) || (k - 1) % 2 != 0) continue;
      const auto dim = (k - 1) / 2;
      auto p = check_dimension(states[j].alpha_history[1], states[j].alpha_history[kMassChannel], dim, opts.rank_tol);
      if (p) {
        poly[j] = std::move(p);
        flags[j] = true;
        result.detect_round[j] = k;
      }
    }

    bool all_stopped = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (!counters[j].stopped()) {
        all_stopped = false;
        continue;
      }
      if (result.local_stop[j] == 0) {
        result.local_stop[j] = *counters[j].stop_round;
        result.node_dmax[j] = compute_dmax(counter_clock(counters[j]), poly[j]->degree);
      }
    }
    if (all_stopped) {
      const auto dmax = result.node_dmax[0];
      for (std::size_t j = 1; j < n; ++j)
        if (result.node_dmax[j] != dmax)
          throw Error(ErrorCode::protocol_error, "nodes disagree on D_max (" + std::to_string(dmax) + " vs " +
                                                     std::to_string(result.node_dmax[j]) + ")");
      if (k >= first_stage_rounds(dmax)) {
        result.dmax = dmax;
        break;
      }
    }
    if (k >= round_limit)
      throw Error(ErrorCode::protocol_error, "first stage did not terminate within " + std::to_string(round_limit) +
                                                 " rounds");

    counters = termination_round(counters, nbrs, flags, k);
    states = decomposed_round(states, steady, nbrs);
    ++k;
    if (result.record) result.record->rounds.push_back(snapshot(states));
  }

  result.rounds = k;
  result.poly.reserve(n);
  for (auto& p : poly) result.poly.push_back(std::move(*p));
  result.outputs = node_outputs(states, result.poly, components, opts.rank_tol);
  return result;
}

CachedResult run_cached(const NeighborSets& nbrs, const RunPlan& plan, const std::vector<PolyCoefficients>& poly,
                        std::uint64_t dmax, const SessionOptions& opts) {
  const auto n = nbrs.size();
  const auto components = components_of(plan);
  if (plan.initial.size() != n || poly.size() != n)
    throw Error(ErrorCode::invalid_argument, "run plan / cache does not match the graph");
  for (const auto& p : poly)
    if (p.degree > dmax) throw Error(ErrorCode::protocol_error, "cached degree exceeds D_max");

  const auto steady = make_weights(nbrs, WeightPhase::steady, std::uint64_t{0});
  CachedResult result;
  result.steady_rounds = steady_rounds(dmax);
  NetworkState states = decomposed_round(plan.initial, plan.initial_weights, nbrs);
  for (std::uint64_t k = 0; k < result.steady_rounds; ++k) states = decomposed_round(states, steady, nbrs);
  result.rounds = 1 + result.steady_rounds;
  result.outputs = node_outputs(states, poly, components, opts.rank_tol);
  return result;
}

std::vector<double> StepResult::node_values(std::size_t component) const {
  std::vector<double> v(outputs.size());
  for (std::size_t j = 0; j < outputs.size(); ++j) v[j] = to_double(outputs[j].at(component));
  return v;
}

Session::Session(DiGraph graph, std::uint64_t seed, SessionOptions opts)
    : graph_(std::move(graph)), nbrs_(neighbor_sets(graph_)), opts_(std::move(opts)), rng_(seed) {
  if (!is_strongly_connected(graph_))
    throw Error(ErrorCode::not_strongly_connected, "PrFTPS requires a strongly connected digraph");
  if (opts_.max_attempts < 1) throw Error(ErrorCode::invalid_argument, "max_attempts must be at least 1");
}

StepResult Session::step(const std::vector<std::vector<Real>>& inputs, std::uint64_t t) {
  if (t == 0 && discovery_) throw Error(ErrorCode::invalid_argument, "step t=0 already ran for this session");
  if (t > 0 && !discovery_) throw Error(ErrorCode::invalid_argument, "step t>=1 needs the t=0 cache");

  StepResult out;
  for (int attempt = 1;; ++attempt) {
    out.attempts = attempt;
    try {
      auto plan = draw_plan(nbrs_, inputs, rng_, opts_);
      if (t == 0) {
        auto d = run_discovery(nbrs_, plan, opts_);
        out.outputs = d.outputs;
        out.rounds = d.rounds;
        discovery_ = std::move(d);
      } else {
        auto c = run_cached(nbrs_, plan, discovery_->poly, discovery_->dmax, opts_);
        out.outputs = std::move(c.outputs);
        out.rounds = c.rounds;
      }
      return out;
    } catch (const Error& e) {
      const bool retryable = e.code() == ErrorCode::degenerate || e.code() == ErrorCode::divide_by_zero;
      if (!retryable || attempt >= opts_.max_attempts) throw;
    }
  }
}

StepResult Session::step(const std::vector<std::vector<double>>& inputs, std::uint64_t t) {
  std::vector<std::vector<Real>> r(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) r[i].assign(inputs[i].begin(), inputs[i].end());
  return step(r, t);
}

StepResult Session::step(const std::vector<double>& scalar_inputs, std::uint64_t t) {
  std::vector<std::vector<Real>> r(scalar_inputs.size());
  for (std::size_t i = 0; i < scalar_inputs.size(); ++i) r[i] = {Real(scalar_inputs[i])};
  return step(r, t);
}

std::uint64_t Session::dmax() const { return discovery().dmax; }

const DiscoveryResult& Session::discovery() const {
  if (!discovery_) throw Error(ErrorCode::invalid_argument, "session has no t=0 cache yet");
  return *discovery_;
}

}  // namespace prftps
