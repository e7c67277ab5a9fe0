#include "prftps/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "prftps/error.hpp"

namespace prftps {

AdversaryModel AdversaryModel::curious(std::vector<std::size_t> nodes) {
  return {AdversaryKind::honest_but_curious, std::move(nodes), {}};
}

AdversaryModel AdversaryModel::eavesdropper(std::vector<Edge> edges) {
  return {AdversaryKind::eavesdropper, {}, std::move(edges)};
}

const char* to_string(AdversaryKind kind) {
  return kind == AdversaryKind::honest_but_curious ? "honest_but_curious" : "eavesdropper";
}

void validate(const AdversaryModel& adv, const DiGraph& g) {
  for (auto a : adv.nodes)
    if (a >= g.size()) throw Error(ErrorCode::invalid_argument, "corrupted node " + std::to_string(a) + " not in graph");
  for (const auto& e : adv.edges)
    if (!g.has_edge(e.from, e.to))
      throw Error(ErrorCode::invalid_argument,
                  "tapped edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " not in graph");
}

namespace {

std::string key(const char* name, std::size_t a) { return std::string(name) + "[" + std::to_string(a) + "]"; }

std::string key(const char* name, std::size_t a, std::size_t b) {
  return key(name, a) + "[" + std::to_string(b) + "]";
}

using RoundView = std::map<std::string, Real>;

void put_alpha(RoundView& view, const Snapshot& s, std::size_t node) {
  for (std::size_t c = 0; c < s.alpha[node].size(); ++c) view[key("alpha", node, c)] = s.alpha[node][c];
}

void put_weight(RoundView& view, const WeightSet& w, std::size_t to, std::size_t from) {
  view[key("p", to, from)] = w.p(static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(from));
}

}  // namespace

ObservationTrace capture_trace(const ExecutionRecord& record, const NeighborSets& nbrs, const AdversaryModel& adv) {
  ObservationTrace trace;
  const auto& rounds = record.rounds;
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const auto& snap = rounds[k];
    const bool sends = k + 1 < rounds.size();
    const WeightSet& w = k == 0 ? record.plan.initial_weights : record.steady;
    RoundView view;

    if (adv.kind == AdversaryKind::honest_but_curious) {
      for (auto a : adv.nodes) {
        put_alpha(view, snap, a);
        for (std::size_t c = 0; c < snap.beta[a].size(); ++c) view[key("beta", a, c)] = snap.beta[a][c];
        if (!sends) continue;
        view[key("a_ab", a)] = w.a_alpha_beta[a];
        view[key("a_ba", a)] = w.a_beta_alpha[a];
        view[key("a_bb", a)] = w.a_beta_beta[a];
        put_weight(view, w, a, a);
        for (auto j : nbrs.out[a]) put_weight(view, w, j, a);
        for (auto q : nbrs.in[a]) {
          put_weight(view, w, a, q);
          put_alpha(view, snap, q);
        }
      }
    } else if (sends) {
      for (const auto& e : adv.edges) {
        put_alpha(view, snap, e.from);
        put_weight(view, w, e.to, e.from);
      }
    }

    for (auto& [name, value] : view) trace.entries.push_back({k, name, value});
  }
  return trace;
}

PrivacyVerdict privacy_condition(const DiGraph& g, std::size_t target, const AdversaryModel& adv) {
  if (target >= g.size()) throw Error(ErrorCode::invalid_argument, "target node not in graph");
  const auto nbrs = neighbor_sets(g);
  PrivacyVerdict verdict;

  auto pick = [&](auto&& open) {
    for (auto m : nbrs.in[target])
      if (open(Edge{m, target}, m)) return PrivacyVerdict{true, m, Situation::in_neighbor};
    for (auto m : nbrs.out[target])
      if (open(Edge{target, m}, m)) return PrivacyVerdict{true, m, Situation::out_neighbor};
    return PrivacyVerdict{};
  };

  if (adv.kind == AdversaryKind::honest_but_curious) {
    const auto corrupted = [&](std::size_t v) {
      return std::find(adv.nodes.begin(), adv.nodes.end(), v) != adv.nodes.end();
    };
    if (corrupted(target)) return verdict;
    return pick([&](const Edge&, std::size_t m) { return !corrupted(m); });
  }
  return pick([&](const Edge& e, std::size_t) {
    return std::find(adv.edges.begin(), adv.edges.end(), e) == adv.edges.end();
  });
}

EquivalentExecution build_equivalent_execution(const ExecutionRecord& record, std::size_t target, std::size_t witness,
                                               const Real& e, Situation situation) {
  const auto& plan = record.plan;
  const auto n = plan.initial.size();
  if (target >= n || witness >= n || target == witness)
    throw Error(ErrorCode::invalid_argument, "target and witness must be distinct nodes of the run");
  const auto& w0 = plan.initial_weights;
  const auto ti = static_cast<Eigen::Index>(target);
  const auto mi = static_cast<Eigen::Index>(witness);
  // Situation one rewrites the witness column, situation two the target column.
  const std::size_t sender = situation == Situation::in_neighbor ? witness : target;
  const auto si = static_cast<Eigen::Index>(sender);
  const std::size_t receiver = situation == Situation::in_neighbor ? target : witness;
  const auto ri = static_cast<Eigen::Index>(receiver);
  if (w0.p(ri, si) == 0)
    throw Error(ErrorCode::invalid_argument, "witness is not adjacent to the target in the required direction");

  const auto& alpha = plan.initial[sender].alpha;
  const auto channels = alpha.size();
  if (channels < 2) throw Error(ErrorCode::invalid_argument, "run plan has no value channel");
  for (std::size_t c = 1; c < channels; ++c)
    if (alpha[c] == 0)
      throw Error(ErrorCode::zero_denominator, "alpha-substate of node " + std::to_string(sender) + " is zero");

  EquivalentExecution alt;
  alt.target = target;
  alt.witness = witness;
  alt.situation = situation;
  alt.plan = plan;

  // One weight change moves sender's push by delta * alpha_c on every channel.
  const Real delta = 2 * e / alpha[1];
  for (std::size_t c = 1; c < channels; ++c) {
    const Real moved = delta * alpha[c];
    alt.shift.push_back(moved / 2);
    alt.plan.initial[target].beta[c] += moved;
    alt.plan.initial[witness].beta[c] -= moved;
  }
  auto& p = alt.plan.initial_weights.p;
  if (situation == Situation::in_neighbor) {
    p(mi, mi) += delta;
    p(ti, mi) -= delta;
  } else {
    p(ti, ti) -= delta;
    p(mi, ti) += delta;
  }
  return alt;
}

double trace_deviation(const ObservationTrace& a, const ObservationTrace& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.entries[i];
    const auto& y = b.entries[i];
    if (x.round != y.round || x.key != y.key) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, to_double(abs(x.value - y.value)));
  }
  return worst;
}

EquivalenceReport verify_equivalence(const NeighborSets& nbrs, const ExecutionRecord& original,
                                     const std::vector<std::vector<Real>>& original_outputs,
                                     const EquivalentExecution& alt, const AdversaryModel& adv,
                                     const SessionOptions& opts, double trace_tol) {
  SessionOptions rerun = opts;
  rerun.keep_record = true;
  const auto replay = run_discovery(nbrs, alt.plan, rerun);

  EquivalenceReport report;
  const auto before = capture_trace(original, nbrs, adv);
  const auto after = capture_trace(*replay.record, nbrs, adv);
  report.trace_entries = before.size();
  report.max_trace_deviation = trace_deviation(before, after);

  for (std::size_t j = 0; j < original_outputs.size(); ++j)
    for (std::size_t c = 0; c < original_outputs[j].size(); ++c)
      report.max_output_deviation =
          std::max(report.max_output_deviation, to_double(abs(original_outputs[j][c] - replay.outputs.at(j).at(c))));

  for (std::size_t c = 0; c < alt.shift.size(); ++c) {
    const Real moved = encoded_input(alt.plan, alt.target, c) - encoded_input(original.plan, alt.target, c);
    report.max_shift_error = std::max(report.max_shift_error, to_double(abs(moved - alt.shift[c])));
  }

  report.equivalent =
      report.max_trace_deviation <= trace_tol && report.max_output_deviation <= kOutputTolerance;
  return report;
}

}  // namespace prftps
