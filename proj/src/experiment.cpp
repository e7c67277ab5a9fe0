#include "prftps/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "prftps/error.hpp"
#include "prftps/privacy.hpp"

namespace prftps {

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::consensus_exactness: return "consensus_exactness";
    case Scenario::gd_convergence: return "gd_convergence";
    case Scenario::privacy_audit: return "privacy_audit";
    case Scenario::round_counts: return "round_counts";
  }
  return "?";
}

Scenario parse_scenario(const std::string& name) {
  for (auto s : {Scenario::consensus_exactness, Scenario::gd_convergence, Scenario::privacy_audit,
                 Scenario::round_counts})
    if (name == to_string(s)) return s;
  throw Error(ErrorCode::invalid_argument, "unknown scenario '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw Error(ErrorCode::invalid_argument, key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(out))
    throw Error(ErrorCode::invalid_argument, key + ": expected a number, got '" + v + "'");
  return out;
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const std::map<std::string, std::function<void(const std::string&)>> setters = {
      {"scenario", [&](const std::string& v) { cfg.scenario = parse_scenario(v); }},
      {"n", [&](const std::string& v) { cfg.n = parse_integer<std::size_t>(key, v); }},
      {"p", [&](const std::string& v) { cfg.p = parse_integer<std::size_t>(key, v); }},
      {"q", [&](const std::string& v) { cfg.q = parse_integer<std::size_t>(key, v); }},
      {"eta", [&](const std::string& v) { cfg.eta = parse_real(key, v); }},
      {"T", [&](const std::string& v) { cfg.steps = parse_integer<std::uint64_t>(key, v); }},
      {"steps", [&](const std::string& v) { cfg.steps = parse_integer<std::uint64_t>(key, v); }},
      {"seed", [&](const std::string& v) { cfg.seed = parse_integer<std::uint64_t>(key, v); }},
      {"graph", [&](const std::string& v) { cfg.graph = v; }},
      {"edge_prob", [&](const std::string& v) { cfg.edge_prob = parse_real(key, v); }},
      {"rank_tol",
       [&](const std::string& v) {
         parse_real(key, v);
         cfg.rank_tol = v;
       }},
      {"trace_tol", [&](const std::string& v) { cfg.trace_tol = parse_real(key, v); }},
      {"trials", [&](const std::string& v) { cfg.trials = parse_integer<std::size_t>(key, v); }},
      {"min_n", [&](const std::string& v) { cfg.min_n = parse_integer<std::size_t>(key, v); }},
      {"max_n", [&](const std::string& v) { cfg.max_n = parse_integer<std::size_t>(key, v); }},
      {"e_points", [&](const std::string& v) { cfg.e_points = parse_integer<std::size_t>(key, v); }},
      {"e_range", [&](const std::string& v) { cfg.e_range = parse_real(key, v); }},
      {"baseline_rounds", [&](const std::string& v) { cfg.baseline_rounds = parse_integer<std::size_t>(key, v); }},
      {"parallel_trials", [&](const std::string& v) { cfg.parallel_trials = parse_integer<std::size_t>(key, v); }},
  };
  const auto it = setters.find(key);
  if (it == setters.end()) throw Error(ErrorCode::invalid_argument, "unknown key '" + key + "'");
  it->second(trim(value));
}

ExperimentConfig parse_config(std::istream& in, const std::string& source, ExperimentConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos)
      throw Error(ErrorCode::invalid_argument, where + "expected key=value, got '" + line + "'");
    try {
      apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), where + e.detail());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open config file " + path.string());
  return parse_config(in, path.string(), std::move(base));
}

void validate(const ExperimentConfig& cfg) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::invalid_argument, what);
  };
  need(cfg.n >= 1, "n must be positive");
  need(cfg.p >= 1, "p must be positive");
  need(cfg.q >= 1, "q must be positive");
  need(cfg.eta > 0, "eta must be positive");
  need(cfg.edge_prob >= 0 && cfg.edge_prob <= 1, "edge_prob must lie in [0, 1]");
  need(Real(cfg.rank_tol) > 0, "rank_tol must be positive");
  need(cfg.trace_tol > 0, "trace_tol must be positive");
  need(cfg.parallel_trials >= 1, "parallel_trials must be positive");
  if (cfg.scenario == Scenario::consensus_exactness) {
    need(cfg.trials >= 1, "trials must be positive");
    need(cfg.min_n >= 1 && cfg.min_n <= cfg.max_n, "need 1 <= min_n <= max_n");
    need(cfg.baseline_rounds >= 1, "baseline_rounds must be positive");
  }
  if (cfg.scenario == Scenario::privacy_audit) {
    need(cfg.e_points >= 1, "e_points must be positive");
    need(cfg.e_range > 0, "e_range must be positive");
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

DiGraph scenario_graph(const ExperimentConfig& cfg) {
  if (cfg.graph.empty())
    return cfg.scenario == Scenario::privacy_audit ? DiGraph::ring(3)
                                                   : random_strongly_connected(cfg.n, cfg.edge_prob, cfg.seed);
  if (cfg.graph == "generated") return random_strongly_connected(cfg.n, cfg.edge_prob, cfg.seed);
  if (cfg.graph == "ring") return DiGraph::ring(cfg.n);
  std::ifstream in(cfg.graph);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot open graph file " + cfg.graph);
  return read_edge_list(in);
}

void emit_plotdata(const ConvergenceReport& report, std::ostream& out) {
  out << "rounds,normalized_residual\n";
  for (const auto& r : report.rows)
    out << r.rounds_cumulative << ',' << format_number(r.normalized_residual) << '\n';
}

namespace {

// Runs body(i) for i in [0, count) on up to `workers` threads; results are
// stored by index so the output order never depends on scheduling.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
}

SessionOptions session_options(const ExperimentConfig& cfg) {
  SessionOptions opts;
  opts.rank_tol = Real(cfg.rank_tol);
  return opts;
}

std::vector<double> normal_inputs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

std::filesystem::path open_csv(const std::filesystem::path& dir, const std::string& name, std::ofstream& out,
                               ScenarioResult& result) {
  auto path = dir / name;
  out.open(path);
  if (!out) throw Error(ErrorCode::invalid_argument, "cannot write " + path.string());
  result.files.push_back(path);
  return path;
}

// First round at which every baseline ratio is within tol of the mean.
std::size_t baseline_rounds_to(const NeighborSets& nbrs, const std::vector<double>& inputs, double mean, double tol,
                               std::size_t limit) {
  auto state = baseline_start(inputs);
  for (std::size_t k = 1; k <= limit; ++k) {
    state = baseline_push_sum_round(state, nbrs);
    const auto r = baseline_ratios(state);
    if (std::all_of(r.begin(), r.end(), [&](double v) { return std::abs(v - mean) <= tol; })) return k;
  }
  return limit + 1;
}

struct ExactnessTrial {
  std::size_t n = 0;
  std::size_t edges = 0;
  std::uint64_t dmax = 0;
  std::uint64_t rounds = 0;
  double max_rel_error = 0;
  std::size_t baseline_rounds = 0;
};

ScenarioResult consensus_exactness(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  ScenarioResult result;
  std::vector<ExactnessTrial> trials(cfg.trials);
  const auto span = cfg.max_n - cfg.min_n + 1;
  parallel_for(cfg.trials, cfg.parallel_trials, [&](std::size_t i) {
    const std::uint64_t seed = cfg.seed * 1000003ULL + i;
    const std::size_t n = cfg.min_n + static_cast<std::size_t>(seed % span);
    const auto g = cfg.graph.empty() ? random_strongly_connected(n, cfg.edge_prob, seed) : scenario_graph(cfg);
    const auto inputs = normal_inputs(g.size(), seed ^ 0x9e3779b97f4a7c15ULL);
    double mean = 0;
    for (auto v : inputs) mean += v / static_cast<double>(inputs.size());

    Session session(g, seed, session_options(cfg));
    const auto out = session.step(inputs, 0);
    auto& t = trials[i];
    t.n = g.size();
    t.edges = g.edge_count();
    t.dmax = session.dmax();
    t.rounds = out.rounds;
    for (auto v : out.node_values()) t.max_rel_error = std::max(t.max_rel_error, std::abs(v - mean) / (1 + std::abs(mean)));
    t.baseline_rounds = baseline_rounds_to(session.neighbors(), inputs, mean, 1e-6, cfg.baseline_rounds);
  });

  std::ofstream csv, cmp;
  open_csv(dir, "consensus_exactness.csv", csv, result);
  open_csv(dir, "rounds_comparison.csv", cmp, result);
  csv << "trial,n,edges,dmax,rounds,max_rel_error\n";
  cmp << "trial,n,baseline_rounds_to_1e-6,prftps_rounds\n";
  double worst = 0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    worst = std::max(worst, t.max_rel_error);
    csv << i << ',' << t.n << ',' << t.edges << ',' << t.dmax << ',' << t.rounds << ','
        << format_number(t.max_rel_error) << '\n';
    cmp << i << ',' << t.n << ',' << t.baseline_rounds << ',' << t.rounds << '\n';
  }
  csv << "max,,,,," << format_number(worst) << '\n';
  result.ok = worst <= 1e-8;
  result.summary = "trials: " + std::to_string(trials.size()) + "\nmax relative error: " + format_number(worst) +
                   "\nwithin 1e-8: " + (result.ok ? "yes" : "no") + "\n";
  return result;
}

ScenarioResult gd_convergence(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  ScenarioResult result;
  const auto g = scenario_graph(cfg);
  auto gd = least_squares_instance(g, cfg.q, cfg.p, cfg.eta, cfg.steps, cfg.seed);
  gd.session = session_options(cfg);
  const auto report = run(gd);

  std::ofstream csv, plot;
  open_csv(dir, "convergence.csv", csv, result);
  csv << "t,rounds_cumulative,normalized_residual,residual_sum,consensus_error\n";
  const auto n = static_cast<double>(g.size());
  for (const auto& r : report.rows)
    csv << r.t << ',' << r.rounds_cumulative << ',' << format_number(r.normalized_residual) << ','
        << format_number(n * r.normalized_residual) << ',' << format_number(r.consensus_error) << '\n';
  open_csv(dir, "plotdata.csv", plot, result);
  emit_plotdata(report, plot);

  const double last = report.rows.back().normalized_residual * n;
  std::ostringstream s;
  s << "n: " << g.size() << "\nfirst-stage rounds: " << report.first_stage_rounds << "\nk_max: " << report.k_max
    << "\ntotal rounds: " << report.total_rounds << "\nfinal residual sum: " << format_number(last)
    << "\nmedian tail ratio: " << format_number(report.median_tail_ratio)
    << "\nrate slope: " << format_number(report.rate_slope)
    << "\nmax gradient-tracking error: " << format_number(report.max_gradient_error)
    << "\nstepsize bound 1/(mu+L): " << format_number(report.stepsize_bound) << '\n';
  if (!report.stepsize_within_bound)
    s << "warning: eta=" << format_number(cfg.eta) << " exceeds the sufficient bound; convergence is not guaranteed\n";
  result.summary = s.str();
  result.ok = std::isfinite(last);
  return result;
}

ScenarioResult round_counts(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  ScenarioResult result;
  const auto g = scenario_graph(cfg);
  Session session(g, cfg.seed, session_options(cfg));
  std::vector<std::vector<double>> inputs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) inputs[i] = normal_inputs(cfg.p, cfg.seed * 31 + i);
  const auto first = session.step(inputs, 0);
  const auto second = session.step(inputs, 1);
  const auto& d = session.discovery();
  const auto& nbrs = session.neighbors();

  std::ofstream csv, sum;
  open_csv(dir, "round_counts.csv", csv, result);
  csv << "node,in_degree,out_degree,degree,detect_round,local_stop,node_dmax\n";
  for (std::size_t j = 0; j < g.size(); ++j)
    csv << j << ',' << nbrs.in[j].size() << ',' << nbrs.out_degree[j] << ',' << d.poly[j].degree << ','
        << d.detect_round[j] << ',' << d.local_stop[j] << ',' << d.node_dmax[j] << '\n';

  const auto k1 = first_stage_rounds(session.dmax());
  const auto kmax = session.k_max();
  const bool first_ok = first.rounds == k1;
  const bool steady_ok = second.rounds == 1 + kmax;
  open_csv(dir, "round_summary.csv", sum, result);
  sum << "n,edges,dmax,k1,k_max,first_stage_rounds,steady_stage_rounds,first_stage_ok,steady_ok\n";
  sum << g.size() << ',' << g.edge_count() << ',' << session.dmax() << ',' << k1 << ',' << kmax << ','
      << first.rounds << ',' << second.rounds - 1 << ',' << first_ok << ',' << steady_ok << '\n';

  result.ok = first_ok && steady_ok;
  std::ostringstream s;
  s << "n: " << g.size() << "\nD_max: " << session.dmax() << "\nk_1 = 4(D_max+1): " << k1
    << "\nk_max = D_max+2: " << kmax << "\nmeasured first stage: " << first.rounds
    << "\nmeasured steady stage: " << second.rounds - 1 << " (+1 initial round)\n";
  result.summary = s.str();
  return result;
}

struct AuditModel {
  std::string name;
  AdversaryModel adv;
  bool control = false;  // condition deliberately violated
};

std::vector<AuditModel> audit_models(const DiGraph& g, const NeighborSets& nbrs, std::size_t target) {
  std::vector<AuditModel> models;
  if (!nbrs.in[target].empty()) {
    const auto m = nbrs.in[target].front();
    std::vector<std::size_t> corrupted;
    for (std::size_t v = 0; v < g.size(); ++v)
      if (v != target && v != m) corrupted.push_back(v);
    models.push_back({"honest_but_curious", AdversaryModel::curious(corrupted), false});
  }
  if (!nbrs.out[target].empty()) {
    const auto m = nbrs.out[target].front();
    std::vector<Edge> tapped;
    for (const auto& e : g.edges())
      if (!(e.from == target && e.to == m)) tapped.push_back(e);
    models.push_back({"eavesdropper", AdversaryModel::eavesdropper(tapped), false});
  }
  std::vector<std::size_t> all_neighbors(nbrs.in[target].begin(), nbrs.in[target].end());
  for (auto v : nbrs.out[target])
    if (std::find(all_neighbors.begin(), all_neighbors.end(), v) == all_neighbors.end()) all_neighbors.push_back(v);
  models.push_back({"negative_control", AdversaryModel::curious(all_neighbors), true});
  return models;
}

DiscoveryResult recorded_run(const NeighborSets& nbrs, const std::vector<double>& inputs, Rng& rng,
                             const SessionOptions& opts, std::size_t sender) {
  std::vector<std::vector<Real>> in(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) in[i] = {Real(inputs[i])};
  for (int attempt = 1;; ++attempt) {
    try {
      auto plan = draw_plan(nbrs, in, rng, opts);
      if (plan.initial[sender].alpha[1] == 0) throw Error(ErrorCode::zero_denominator, "zero alpha split");
      return run_discovery(nbrs, plan, opts);
    } catch (const Error& e) {
      const bool retry = e.code() == ErrorCode::degenerate || e.code() == ErrorCode::divide_by_zero ||
                         e.code() == ErrorCode::zero_denominator;
      if (!retry || attempt >= opts.max_attempts) throw;
    }
  }
}

ScenarioResult privacy_audit(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  ScenarioResult result;
  const auto g = scenario_graph(cfg);
  const auto nbrs = neighbor_sets(g);
  const std::size_t target = 0;
  auto opts = session_options(cfg);
  opts.keep_record = true;
  const auto inputs = normal_inputs(g.size(), cfg.seed);

  std::vector<double> grid(cfg.e_points);
  for (std::size_t i = 0; i < grid.size(); ++i)
    grid[i] = grid.size() == 1 ? cfg.e_range
                               : -cfg.e_range + 2 * cfg.e_range * static_cast<double>(i) /
                                                    static_cast<double>(grid.size() - 1);

  std::ofstream csv;
  open_csv(dir, "privacy_audit.csv", csv, result);
  csv << "model,target,witness,situation,condition,e,max_trace_deviation,max_output_deviation,shift_error,"
         "equivalent\n";
  std::ostringstream s;
  s << "graph: n=" << g.size() << " edges=" << g.edge_count() << "\ntarget: " << target << '\n';

  Rng rng(cfg.seed);
  for (const auto& model : audit_models(g, nbrs, target)) {
    validate(model.adv, g);
    auto verdict = privacy_condition(g, target, model.adv);
    std::size_t witness = 0;
    Situation situation = Situation::in_neighbor;
    if (verdict.preserved) {
      witness = *verdict.witness;
      situation = *verdict.situation;
    } else if (!nbrs.in[target].empty()) {
      witness = nbrs.in[target].front();
    } else {
      witness = nbrs.out[target].front();
      situation = Situation::out_neighbor;
    }
    const auto sender = situation == Situation::in_neighbor ? witness : target;
    const auto base = recorded_run(nbrs, inputs, rng, opts, sender);

    std::vector<EquivalenceReport> reports(grid.size());
    parallel_for(grid.size(), cfg.parallel_trials, [&](std::size_t i) {
      const auto alt = build_equivalent_execution(*base.record, target, witness, Real(grid[i]), situation);
      reports[i] = verify_equivalence(nbrs, *base.record, base.outputs, alt, model.adv, opts, cfg.trace_tol);
    });

    double worst_trace = 0, worst_output = 0;
    bool all_equivalent = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& r = reports[i];
      worst_trace = std::max(worst_trace, r.max_trace_deviation);
      worst_output = std::max(worst_output, r.max_output_deviation);
      all_equivalent = all_equivalent && r.equivalent;
      csv << model.name << ',' << target << ',' << witness << ','
          << (situation == Situation::in_neighbor ? "in_neighbor" : "out_neighbor") << ','
          << (verdict.preserved ? "preserved" : "not_guaranteed") << ',' << format_number(grid[i]) << ','
          << format_number(r.max_trace_deviation) << ',' << format_number(r.max_output_deviation) << ','
          << format_number(r.max_shift_error) << ',' << (r.equivalent ? 1 : 0) << '\n';
    }

    const char* outcome = verdict.preserved ? (all_equivalent ? "preserved" : "VIOLATED")
                                            : (all_equivalent ? "indistinguishable" : "distinguishable");
    s << model.name << ": condition=" << (verdict.preserved ? "preserved" : "not_guaranteed")
      << " witness=" << witness << " verdict=" << outcome << " max_trace_deviation=" << format_number(worst_trace)
      << " max_output_deviation=" << format_number(worst_output) << " e_points=" << grid.size()
      << " diameter_lower_bound=" << format_number(all_equivalent ? grid.back() - grid.front() : 0.0) << '\n';
    if (verdict.preserved && !all_equivalent) result.ok = false;
    if (model.control && verdict.preserved) result.ok = false;
  }
  result.summary = s.str();
  return result;
}

}  // namespace

ScenarioResult run_scenario(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  validate(cfg);
  std::filesystem::create_directories(out_dir);
  ScenarioResult result;
  switch (cfg.scenario) {
    case Scenario::consensus_exactness: result = consensus_exactness(cfg, out_dir); break;
    case Scenario::gd_convergence: result = gd_convergence(cfg, out_dir); break;
    case Scenario::privacy_audit: result = privacy_audit(cfg, out_dir); break;
    case Scenario::round_counts: result = round_counts(cfg, out_dir); break;
  }
  const auto summary_path = out_dir / (std::string(to_string(cfg.scenario)) + "_summary.txt");
  std::ofstream summary(summary_path);
  summary << "scenario: " << to_string(cfg.scenario) << "\nseed: " << cfg.seed << '\n' << result.summary;
  result.files.push_back(summary_path);
  return result;
}

}  // namespace prftps
