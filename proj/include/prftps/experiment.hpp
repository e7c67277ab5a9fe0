#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "prftps/digraph.hpp"
#include "prftps/optimizer.hpp"

namespace prftps {

enum class Scenario { consensus_exactness, gd_convergence, privacy_audit, round_counts };

const char* to_string(Scenario s);
Scenario parse_scenario(const std::string& name);

struct ExperimentConfig {
  Scenario scenario = Scenario::round_counts;
  std::size_t n = 5;
  std::size_t p = 3;
  std::size_t q = 3;
  double eta = 0.1;
  std::uint64_t steps = 200;        // T
  std::uint64_t seed = 1;
  std::string graph;                // "", "generated", "ring" or an edge-list path
  double edge_prob = 0.3;           // extra-edge probability for generated graphs
  std::string rank_tol = "1e-50";   // kept as text so it parses at full precision
  double trace_tol = 1e-10;
  std::size_t trials = 50;          // consensus_exactness
  std::size_t min_n = 2;            // consensus_exactness node-count range
  std::size_t max_n = 10;
  std::size_t e_points = 100;       // privacy_audit grid
  double e_range = 1e6;
  std::size_t baseline_rounds = 500;
  std::size_t parallel_trials = 1;
};

// Flat key=value lines; '#' starts a comment. Unknown keys and malformed
// values raise Error(invalid_argument) naming the line and the key.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>",
                              ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void validate(const ExperimentConfig& cfg);

// "%.17g", the format every CSV cell goes through.
std::string format_number(double v);

struct ScenarioResult {
  bool ok = true;
  std::string summary;                       // human-readable, one line per fact
  std::vector<std::filesystem::path> files;  // artifacts written
};

ScenarioResult run_scenario(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// (cumulative rounds, normalized residual), header included.
void emit_plotdata(const ConvergenceReport& report, std::ostream& out);

// Graph the scenario runs on. An empty graph setting means a 3-cycle for
// privacy_audit and a seeded random strongly connected digraph otherwise.
DiGraph scenario_graph(const ExperimentConfig& cfg);

}  // namespace prftps
