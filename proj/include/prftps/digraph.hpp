#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <utility>
#include <vector>

namespace prftps {

// A directed link: `from` can send messages to `to`.
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Directed communication topology. Self-links are implicit in every update
// rule and are never stored.
class DiGraph {
 public:
  explicit DiGraph(std::size_t n);
  DiGraph(std::size_t n, const std::vector<Edge>& edges);

  void add_edge(std::size_t from, std::size_t to);

  std::size_t size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::set<Edge>& edges() const noexcept { return edges_; }
  bool has_edge(std::size_t from, std::size_t to) const { return edges_.count({from, to}) != 0; }

  static DiGraph ring(std::size_t n);

 private:
  std::size_t n_;
  std::set<Edge> edges_;
};

struct NeighborSets {
  std::vector<std::vector<std::size_t>> in;   // N_i^-: nodes that send to i
  std::vector<std::vector<std::size_t>> out;  // N_i^+: nodes that i sends to
  std::vector<std::size_t> out_degree;

  std::size_t size() const noexcept { return out_degree.size(); }
};

NeighborSets neighbor_sets(const DiGraph& g);

bool is_strongly_connected(const DiGraph& g);

// Random Hamiltonian cycle plus independent extra edges with probability
// `extra_edge_prob`; strongly connected by construction.
DiGraph random_strongly_connected(std::size_t n, double extra_edge_prob, std::uint64_t seed);

// Edge-list text: first line "n", then one "j i" pair per line, meaning the
// link i -> j. Blank lines and lines starting with '#' are ignored.
DiGraph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const DiGraph& g);

}  // namespace prftps
