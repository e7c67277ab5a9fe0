#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "prftps/error.hpp"
#include "prftps/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Run a PrFTPS experiment scenario and write CSV artifacts."};

  std::string scenario, config, graph_file, rank_tol, out_dir = "out";
  std::uint64_t seed = 0, steps = 0;
  double eta = 0;
  std::size_t parallel = 0;

  app.add_option("--scenario", scenario, "consensus_exactness | gd_convergence | privacy_audit | round_counts");
  app.add_option("--config", config, "key=value config file; flags override it")->check(CLI::ExistingFile);
  app.add_option("--graph-file", graph_file, "edge list: first line n, then one 'to from' pair per line")
      ->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "base seed");
  app.add_option("--out-dir", out_dir, "directory for CSV output")->capture_default_str();
  auto* eta_opt = app.add_option("--eta", eta, "gradient stepsize");
  auto* steps_opt = app.add_option("--steps", steps, "optimization steps T");
  app.add_option("--rank-tol", rank_tol, "Hankel rank tolerance");
  auto* par_opt = app.add_option("--parallel-trials", parallel, "worker threads for independent trials");

  CLI11_PARSE(app, argc, argv);

  try {
    prftps::ExperimentConfig cfg;
    if (!config.empty()) cfg = prftps::load_config(config, cfg);
    if (!scenario.empty()) prftps::apply_setting(cfg, "scenario", scenario);
    if (!graph_file.empty()) cfg.graph = graph_file;
    if (*seed_opt) cfg.seed = seed;
    if (*eta_opt) cfg.eta = eta;
    if (*steps_opt) cfg.steps = steps;
    if (!rank_tol.empty()) prftps::apply_setting(cfg, "rank_tol", rank_tol);
    if (*par_opt) cfg.parallel_trials = parallel;

    const auto result = prftps::run_scenario(cfg, out_dir);
    std::cout << result.summary;
    for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
    return result.ok ? EXIT_SUCCESS : 2;
  } catch (const prftps::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
}
