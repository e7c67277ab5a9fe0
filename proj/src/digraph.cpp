#include "prftps/digraph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "prftps/error.hpp"

namespace prftps {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
    case ErrorCode::insufficient_data: return "INSUFFICIENT_DATA";
    case ErrorCode::not_strongly_connected: return "NOT_STRONGLY_CONNECTED";
    case ErrorCode::degenerate: return "DEGENERATE";
    case ErrorCode::divide_by_zero: return "DIVIDE_BY_ZERO";
    case ErrorCode::zero_denominator: return "ZERO_DENOMINATOR";
    case ErrorCode::protocol_error: return "PROTOCOL_ERROR";
  }
  return "UNKNOWN";
}

DiGraph::DiGraph(std::size_t n) : n_(n) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "graph needs at least one node");
}

DiGraph::DiGraph(std::size_t n, const std::vector<Edge>& edges) : DiGraph(n) {
  for (const auto& e : edges) add_edge(e.from, e.to);
}

void DiGraph::add_edge(std::size_t from, std::size_t to) {
  if (from >= n_ || to >= n_)
    throw Error(ErrorCode::invalid_argument,
                "edge (" + std::to_string(from) + "->" + std::to_string(to) + ") out of range");
  if (from == to) return;  // self-links are implicit
  edges_.insert({from, to});
}

DiGraph DiGraph::ring(std::size_t n) {
  DiGraph g(n);
  for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

NeighborSets neighbor_sets(const DiGraph& g) {
  NeighborSets s;
  s.in.resize(g.size());
  s.out.resize(g.size());
  s.out_degree.assign(g.size(), 0);
  // std::set ordering keeps both lists sorted.
  for (const auto& e : g.edges()) {
    s.out[e.from].push_back(e.to);
    s.in[e.to].push_back(e.from);
  }
  for (auto& v : s.in) std::sort(v.begin(), v.end());
  for (std::size_t i = 0; i < g.size(); ++i) s.out_degree[i] = s.out[i].size();
  return s;
}

namespace {

std::size_t reach_count(const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count;
}

}  // namespace

bool is_strongly_connected(const DiGraph& g) {
  auto s = neighbor_sets(g);
  return reach_count(s.out) == g.size() && reach_count(s.in) == g.size();
}

DiGraph random_strongly_connected(std::size_t n, double extra_edge_prob, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::invalid_argument, "n must be positive");
  if (!(extra_edge_prob >= 0.0 && extra_edge_prob <= 1.0))
    throw Error(ErrorCode::invalid_argument, "extra_edge_prob must lie in [0, 1]");

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  DiGraph g(n);
  if (n == 1) return g;
  for (std::size_t k = 0; k < n; ++k) g.add_edge(order[k], order[(k + 1) % n]);

  std::bernoulli_distribution coin(extra_edge_prob);
  for (std::size_t from = 0; from < n; ++from)
    for (std::size_t to = 0; to < n; ++to)
      if (from != to && coin(rng)) g.add_edge(from, to);
  return g;
}

DiGraph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      auto first = out.find_first_not_of(" \t\r");
      if (first == std::string::npos || out[first] == '#') continue;
      return true;
    }
    return false;
  };

  if (!next_line(line)) throw Error(ErrorCode::invalid_argument, "edge list: missing node count");
  std::istringstream header(line);
  long long n = 0;
  if (!(header >> n) || n <= 0)
    throw Error(ErrorCode::invalid_argument,
                "edge list line " + std::to_string(line_no) + ": bad node count");

  DiGraph g(static_cast<std::size_t>(n));
  while (next_line(line)) {
    std::istringstream row(line);
    long long to = -1, from = -1;
    if (!(row >> to >> from) || to < 0 || from < 0 || to >= n || from >= n)
      throw Error(ErrorCode::invalid_argument,
                  "edge list line " + std::to_string(line_no) + ": expected \"j i\" in [0, n)");
    g.add_edge(static_cast<std::size_t>(from), static_cast<std::size_t>(to));
  }
  return g;
}

void write_edge_list(std::ostream& out, const DiGraph& g) {
  out << g.size() << '\n';
  for (const auto& e : g.edges()) out << e.to << ' ' << e.from << '\n';
}

}  // namespace prftps
