#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prftps/digraph.hpp"
#include "prftps/prftps.hpp"
#include "prftps/real.hpp"

namespace prftps {

enum class AdversaryKind { honest_but_curious, eavesdropper };

struct AdversaryModel {
  AdversaryKind kind = AdversaryKind::honest_but_curious;
  std::vector<std::size_t> nodes;  // corrupted nodes (honest_but_curious)
  std::vector<Edge> edges;         // tapped edges (eavesdropper)

  static AdversaryModel curious(std::vector<std::size_t> nodes);
  static AdversaryModel eavesdropper(std::vector<Edge> edges);
};

const char* to_string(AdversaryKind kind);

// Rejects nodes or edges that do not belong to g.
void validate(const AdversaryModel& adv, const DiGraph& g);

struct TraceEntry {
  std::uint64_t round = 0;
  std::string key;
  Real value;
};

struct ObservationTrace {
  std::vector<TraceEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }
};

// Filters a recorded execution down to what the adversary can see. Round k
// messages use the k=0 weights for k = 0 and the steady weights afterwards.
ObservationTrace capture_trace(const ExecutionRecord& record, const NeighborSets& nbrs, const AdversaryModel& adv);

// Situation one: the witness m sends to j. Situation two: j sends to m.
enum class Situation { in_neighbor, out_neighbor };

struct PrivacyVerdict {
  bool preserved = false;
  std::optional<std::size_t> witness;
  std::optional<Situation> situation;
};

// In-neighbor witnesses are preferred over out-neighbor ones.
PrivacyVerdict privacy_condition(const DiGraph& g, std::size_t target, const AdversaryModel& adv);

struct EquivalentExecution {
  std::size_t target = 0;
  std::size_t witness = 0;
  Situation situation = Situation::in_neighbor;
  std::vector<Real> shift;  // per input component; target moves by +shift, witness by -shift
  RunPlan plan;             // substituted k=0 substates and weights
};

// All value channels share the k=0 weights, so the per-component shifts are
// tied together: shift_c = e * alpha_c / alpha_1 with alpha taken at the node
// whose weight is rewritten (witness for in_neighbor, target for out_neighbor).
// Throws Error(zero_denominator) when that alpha vanishes.
EquivalentExecution build_equivalent_execution(const ExecutionRecord& record, std::size_t target, std::size_t witness,
                                               const Real& e, Situation situation);

struct EquivalenceReport {
  bool equivalent = false;     // traces agree and outputs agree
  double max_trace_deviation = 0;
  double max_output_deviation = 0;
  double max_shift_error = 0;  // |x_j'' - x_j' - shift| over components
  std::size_t trace_entries = 0;
};

inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kOutputTolerance = 1e-9;

// Re-runs the first stage on the substituted plan and compares adversary traces.
EquivalenceReport verify_equivalence(const NeighborSets& nbrs, const ExecutionRecord& original,
                                     const std::vector<std::vector<Real>>& original_outputs,
                                     const EquivalentExecution& alt, const AdversaryModel& adv,
                                     const SessionOptions& opts, double trace_tol = kTraceTolerance);

// Largest elementwise difference; traces with different layouts give +inf.
double trace_deviation(const ObservationTrace& a, const ObservationTrace& b);

}  // namespace prftps
