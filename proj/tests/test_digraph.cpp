#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "prftps/digraph.hpp"
#include "prftps/error.hpp"

using namespace prftps;

namespace {

// Reachability by repeated boolean squaring.
bool closure_strongly_connected(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = true;
  for (const auto& e : edges) r[e.from][e.to] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!r[i][j]) return false;
  return true;
}

}  // namespace

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(DiGraph(0), Error);
  DiGraph g(3);
  CHECK_THROWS_AS(g.add_edge(0, 3), Error);
  g.add_edge(1, 1);
  CHECK(g.edge_count() == 0);
  g.add_edge(0, 1);
  g.add_edge(0, 1);
  CHECK(g.edge_count() == 1);
}

TEST_CASE("ring neighbor sets") {
  const auto g = DiGraph::ring(3);
  const auto nb = neighbor_sets(g);
  CHECK(nb.in[0] == std::vector<std::size_t>{2});
  CHECK(nb.out[0] == std::vector<std::size_t>{1});
  CHECK(nb.out_degree == std::vector<std::size_t>{1, 1, 1});
  CHECK(is_strongly_connected(g));
}

TEST_CASE("single node is strongly connected") { CHECK(is_strongly_connected(DiGraph(1))); }

TEST_CASE("path is not strongly connected") {
  CHECK_FALSE(is_strongly_connected(DiGraph(3, {{0, 1}, {1, 2}})));
}

TEST_CASE("strong connectivity matches transitive closure on every digraph with n <= 4") {
  for (std::size_t n = 2; n <= 4; ++n) {
    std::vector<Edge> all;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) all.push_back({i, j});
    for (std::uint32_t mask = 0; mask < (1u << all.size()); ++mask) {
      std::vector<Edge> edges;
      for (std::size_t b = 0; b < all.size(); ++b)
        if (mask >> b & 1u) edges.push_back(all[b]);
      REQUIRE(is_strongly_connected(DiGraph(n, edges)) == closure_strongly_connected(n, edges));
    }
  }
}

TEST_CASE("random generator") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = random_strongly_connected(2 + seed % 9, 0.3, seed);
    CHECK(is_strongly_connected(g));
  }
  CHECK(random_strongly_connected(6, 0.4, 11).edges() == random_strongly_connected(6, 0.4, 11).edges());
  CHECK_THROWS_AS(random_strongly_connected(0, 0.3, 1), Error);
  CHECK_THROWS_AS(random_strongly_connected(4, 1.5, 1), Error);
  CHECK(random_strongly_connected(5, 1.0, 3).edge_count() == 20);
}

TEST_CASE("edge list round trip") {
  const auto g = random_strongly_connected(7, 0.3, 5);
  std::stringstream s;
  write_edge_list(s, g);
  const auto h = read_edge_list(s);
  CHECK(h.size() == g.size());
  CHECK(h.edges() == g.edges());
}

TEST_CASE("edge list format: 'j i' is the link i -> j") {
  std::istringstream in("# comment\n3\n\n1 0\n2 1\n0 2\n");
  const auto g = read_edge_list(in);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 2));
  CHECK(g.has_edge(2, 0));
  CHECK_FALSE(g.has_edge(1, 0));
}

TEST_CASE("edge list errors name the line") {
  std::istringstream bad("3\n1 0\n7 1\n");
  try {
    read_edge_list(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  std::istringstream junk("3\nfoo\n");
  CHECK_THROWS_AS(read_edge_list(junk), Error);
}
