#include "prftps/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>

#include "prftps/error.hpp"

namespace prftps {

LeastSquaresObjective::LeastSquaresObjective(Eigen::MatrixXd a, Eigen::VectorXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size() || a_.cols() == 0)
    throw Error(ErrorCode::invalid_argument, "least-squares objective: A rows must match b");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a_.transpose() * a_);
  mu_ = 2.0 * eig.eigenvalues().minCoeff();
  l_ = 2.0 * eig.eigenvalues().maxCoeff();
}

double LeastSquaresObjective::value(const Eigen::VectorXd& x) const { return (a_ * x - b_).squaredNorm(); }

Eigen::VectorXd LeastSquaresObjective::gradient(const Eigen::VectorXd& x) const {
  return 2.0 * a_.transpose() * (a_ * x - b_);
}

Eigen::VectorXd least_squares_optimum(const std::vector<LeastSquaresObjective>& objectives) {
  if (objectives.empty()) throw Error(ErrorCode::invalid_argument, "no objectives");
  const auto p = static_cast<Eigen::Index>(objectives.front().dimension());
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  for (const auto& f : objectives) {
    normal += f.a().transpose() * f.a();
    rhs += f.a().transpose() * f.b();
  }
  return normal.ldlt().solve(rhs);
}

double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> eig(m, false);
  double rho = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) rho = std::max(rho, std::abs(eig.eigenvalues()(i)));
  return rho;
}

RowStochasticMixer make_mixer(const DiGraph& g) {
  if (!is_strongly_connected(g))
    throw Error(ErrorCode::not_strongly_connected, "mixing matrix needs a strongly connected digraph");
  const auto nbrs = neighbor_sets(g);
  const auto n = static_cast<Eigen::Index>(g.size());

  RowStochasticMixer mix;
  mix.abar = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& in = nbrs.in[static_cast<std::size_t>(i)];
    const double w = 1.0 / (1.0 + static_cast<double>(in.size()));
    mix.abar(i, i) = w;
    for (auto j : in) mix.abar(i, static_cast<Eigen::Index>(j)) = w;
  }

  // Left Perron vector: eigenvector of abar^T for the eigenvalue closest to 1.
  Eigen::EigenSolver<Eigen::MatrixXd> eig(mix.abar.transpose());
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < n; ++i)
    if (std::abs(eig.eigenvalues()(i) - 1.0) < std::abs(eig.eigenvalues()(best) - 1.0)) best = i;
  Eigen::VectorXd u = eig.eigenvectors().col(best).real();
  u /= u.sum();
  u *= static_cast<double>(n);
  if (u.minCoeff() < -1e-12) throw Error(ErrorCode::protocol_error, "left Perron vector is not nonnegative");
  mix.perron_left = u.cwiseMax(0.0);

  const Eigen::MatrixXd residual =
      mix.abar - Eigen::VectorXd::Ones(n) * mix.perron_left.transpose() / static_cast<double>(n);
  mix.contraction = spectral_radius(residual);
  if (!(mix.contraction < 1.0))
    throw Error(ErrorCode::protocol_error, "rho(abar - 1u^T/n) is not below one");
  return mix;
}

double stepsize_bound(const ObjectiveSet& objectives) {
  if (objectives.empty()) throw Error(ErrorCode::invalid_argument, "no objectives");
  double mu = objectives.front()->strong_convexity();
  double l = objectives.front()->lipschitz();
  for (const auto& f : objectives) {
    mu = std::min(mu, f->strong_convexity());
    l = std::max(l, f->lipschitz());
  }
  return 1.0 / (mu + l);
}

OptimizerState gd_step(const OptimizerState& state, const RowStochasticMixer& mixer, Session& session,
                       const ObjectiveSet& objectives) {
  const auto n = state.x.size();
  if (objectives.size() != n || static_cast<std::size_t>(mixer.abar.rows()) != n)
    throw Error(ErrorCode::invalid_argument, "optimizer state, mixer and objectives disagree on n");

  std::vector<std::vector<double>> grads(n);
  Eigen::VectorXd mean_grad = Eigen::VectorXd::Zero(state.x.front().size());
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd g = objectives[i]->gradient(state.x[i]);
    grads[i].assign(g.data(), g.data() + g.size());
    mean_grad += g / static_cast<double>(n);
  }

  const auto avg = session.step(grads, state.t);

  OptimizerState next;
  next.eta = state.eta;
  next.t = state.t + 1;
  next.rounds = state.rounds + avg.rounds;
  next.y.resize(n);
  next.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd y(mean_grad.size());
    for (Eigen::Index c = 0; c < y.size(); ++c) y(c) = to_double(avg.outputs[i][static_cast<std::size_t>(c)]);
    next.y_error = std::max(next.y_error, (y - mean_grad).norm() / (1.0 + mean_grad.norm()));
    next.y[i] = y;

    Eigen::VectorXd mixed = Eigen::VectorXd::Zero(y.size());
    for (std::size_t j = 0; j < n; ++j) {
      const double w = mixer.abar(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (w != 0.0) mixed += w * state.x[j];
    }
    next.x[i] = mixed - state.eta * y;
  }
  return next;
}

GdConfig least_squares_instance(const DiGraph& g, std::size_t q, std::size_t p, double eta, std::uint64_t steps,
                                std::uint64_t seed) {
  if (q == 0 || p == 0) throw Error(ErrorCode::invalid_argument, "q and p must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&] { return normal(rng); };

  GdConfig cfg;
  cfg.graph = g;
  cfg.eta = eta;
  cfg.steps = steps;
  cfg.seed = seed;
  const auto qi = static_cast<Eigen::Index>(q);
  const auto pi = static_cast<Eigen::Index>(p);
  for (std::size_t i = 0; i < g.size(); ++i) {
    Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(qi, pi, draw);
    Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(qi, draw);
    cfg.objectives.emplace_back(std::move(a), std::move(b));
  }
  for (std::size_t i = 0; i < g.size(); ++i) cfg.x0.push_back(Eigen::VectorXd::NullaryExpr(pi, draw));
  return cfg;
}

namespace {

ConvergenceRow measure(const OptimizerState& s, const std::vector<Eigen::VectorXd>& x0, const Eigen::VectorXd& opt,
                       const Eigen::VectorXd& u) {
  const auto n = s.x.size();
  ConvergenceRow row;
  row.t = s.t;
  row.rounds_cumulative = s.rounds;
  Eigen::VectorXd xbar = Eigen::VectorXd::Zero(opt.size());
  for (std::size_t i = 0; i < n; ++i) {
    row.normalized_residual += (s.x[i] - opt).norm() / (x0[i] - opt).norm();
    xbar += u(static_cast<Eigen::Index>(i)) * s.x[i];
  }
  row.normalized_residual /= static_cast<double>(n);
  xbar /= static_cast<double>(n);
  double sq = 0;
  for (std::size_t i = 0; i < n; ++i) sq += (s.x[i] - xbar).squaredNorm();
  row.consensus_error = std::sqrt(sq);
  return row;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const auto mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

ConvergenceReport run(const GdConfig& config) {
  const auto n = config.graph.size();
  if (config.objectives.size() != n || config.x0.size() != n)
    throw Error(ErrorCode::invalid_argument, "one objective and one start point per node required");
  if (!(config.eta > 0.0)) throw Error(ErrorCode::invalid_argument, "stepsize must be positive");

  ObjectiveSet objectives;
  for (const auto& f : config.objectives) objectives.push_back(std::make_shared<LeastSquaresObjective>(f));
  const auto opt = least_squares_optimum(config.objectives);
  const auto mixer = make_mixer(config.graph);
  Session session(config.graph, config.seed, config.session);

  ConvergenceReport report;
  report.stepsize_bound = stepsize_bound(objectives);
  report.stepsize_within_bound = config.eta < report.stepsize_bound;

  OptimizerState state;
  state.x = config.x0;
  state.eta = config.eta;
  report.rows.push_back(measure(state, config.x0, opt, mixer.perron_left));
  for (std::uint64_t t = 0; t < config.steps; ++t) {
    state = gd_step(state, mixer, session, objectives);
    report.max_gradient_error = std::max(report.max_gradient_error, state.y_error);
    report.rows.push_back(measure(state, config.x0, opt, mixer.perron_left));
  }
  if (session.has_cache()) {
    report.first_stage_rounds = session.discovery().rounds;
    report.k_max = session.k_max();
  }
  report.total_rounds = state.rounds;
  for (const auto& x : state.x)
    report.final_optimality_error = std::max(report.final_optimality_error, (x - opt).norm() / (1.0 + opt.norm()));

  // Rate diagnostics over the points still above the numerical floor.
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : report.rows) {
    if (r.normalized_residual > 1e-12) pts.emplace_back(static_cast<double>(r.t), std::log(r.normalized_residual));
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].normalized_residual > report.rows[i - 1].normalized_residual) report.monotone = false;

  const auto tail_begin = pts.size() / 2;
  if (pts.size() - tail_begin >= 2) {
    double st = 0, sl = 0, stt = 0, stl = 0;
    const auto m = static_cast<double>(pts.size() - tail_begin);
    std::vector<double> ratios;
    for (std::size_t i = tail_begin; i < pts.size(); ++i) {
      st += pts[i].first;
      sl += pts[i].second;
      stt += pts[i].first * pts[i].first;
      stl += pts[i].first * pts[i].second;
      if (i > tail_begin) ratios.push_back(std::exp(pts[i].second - pts[i - 1].second));
    }
    report.rate_slope = (m * stl - st * sl) / (m * stt - st * st);
    report.median_tail_ratio = median(ratios);
  }
  return report;
}

}  // namespace prftps
