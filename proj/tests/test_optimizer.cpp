#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "prftps/error.hpp"
#include "prftps/optimizer.hpp"

using namespace prftps;

TEST_CASE("least-squares gradient matches central differences") {
  Eigen::MatrixXd a(3, 2);
  a << 1, 2, -1, 0.5, 3, -2;
  Eigen::VectorXd b(3);
  b << 0.3, -1, 2;
  const LeastSquaresObjective f(a, b);
  Eigen::VectorXd x(2);
  x << 0.7, -0.4;
  const auto g = f.gradient(x);
  for (Eigen::Index i = 0; i < 2; ++i) {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(2);
    h(i) = 1e-6;
    CHECK(g(i) == doctest::Approx((f.value(x + h) - f.value(x - h)) / 2e-6).epsilon(1e-7));
  }
}

TEST_CASE("curvature constants from the closed-form 2x2 spectrum") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 0, 1;
  const LeastSquaresObjective f(a, Eigen::VectorXd::Zero(2));
  // A^T A = [[4, 2], [2, 2]]: eigenvalues 3 +- sqrt(5).
  CHECK(f.strong_convexity() == doctest::Approx(2 * (3 - std::sqrt(5.0))));
  CHECK(f.lipschitz() == doctest::Approx(2 * (3 + std::sqrt(5.0))));
  CHECK_THROWS_AS(LeastSquaresObjective(a, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("normal-equation optimum zeroes the summed gradient") {
  const auto cfg = least_squares_instance(DiGraph::ring(4), 3, 3, 0.1, 0, 2);
  const auto x = least_squares_optimum(cfg.objectives);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
  for (const auto& f : cfg.objectives) g += f.gradient(x);
  CHECK(g.norm() < 1e-10);
}

TEST_CASE("row-stochastic mixer and its left Perron vector") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_strongly_connected(2 + seed % 9, 0.3, seed);
    const auto m = make_mixer(g);
    const auto n = static_cast<double>(g.size());
    CHECK((m.abar.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
    CHECK(m.perron_left.sum() == doctest::Approx(n));
    CHECK(m.perron_left.minCoeff() > 0);
    CHECK((m.abar.transpose() * m.perron_left - m.perron_left).norm() < 1e-10);
    CHECK(m.contraction < 1.0);
  }
  CHECK_THROWS_AS(make_mixer(DiGraph(2, {{0, 1}})), Error);
}

TEST_CASE("power iteration oracle for the 2-node mixer") {
  const auto m = make_mixer(DiGraph(2, {{0, 1}, {1, 0}}));
  Eigen::VectorXd u = Eigen::VectorXd::Ones(2);
  for (int k = 0; k < 200; ++k) u = m.abar.transpose() * u;
  CHECK((u - m.perron_left).norm() < 1e-12);
  CHECK(m.contraction < 1e-12);
}

TEST_CASE("zero steps keep only the initial row") {
  const auto report = run(least_squares_instance(DiGraph::ring(3), 3, 3, 0.1, 0, 4));
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].rounds_cumulative == 0);
  CHECK(report.rows[0].normalized_residual == doctest::Approx(1.0));
}

TEST_CASE("gradient descent converges and counts rounds per step") {
  auto cfg = least_squares_instance(random_strongly_connected(4, 0.4, 6), 3, 3, 0.02, 120, 6);
  const auto report = run(cfg);
  REQUIRE(report.rows.size() == 121);
  const auto k1 = report.first_stage_rounds;
  CHECK(k1 == first_stage_rounds(report.k_max - 2));
  for (std::size_t t = 1; t < report.rows.size(); ++t)
    CHECK(report.rows[t].rounds_cumulative == k1 + (t - 1) * (1 + report.k_max));
  CHECK(report.max_gradient_error < 1e-8);
  CHECK(report.rows.back().normalized_residual < 1e-3);
  CHECK(report.median_tail_ratio < 1.0);
  CHECK(report.rate_slope < 0.0);
}

TEST_CASE("stepsize bound") {
  ObjectiveSet set;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  set.push_back(std::make_shared<LeastSquaresObjective>(a, Eigen::VectorXd::Zero(2)));
  set.push_back(std::make_shared<LeastSquaresObjective>(3 * a, Eigen::VectorXd::Zero(2)));
  CHECK(stepsize_bound(set) == doctest::Approx(1.0 / (2.0 + 18.0)));
}

TEST_CASE("single node scalar descent converges to the minimizer") {
  GdConfig cfg;
  cfg.graph = DiGraph(1);
  Eigen::MatrixXd a(1, 1);
  a << 1;
  Eigen::VectorXd b(1);
  b << 3;
  cfg.objectives.emplace_back(a, b);
  cfg.x0 = {Eigen::VectorXd::Zero(1)};
  cfg.eta = 0.1;
  cfg.steps = 60;
  const auto report = run(cfg);
  // x(t) = 3 - 3 * 0.8^t
  for (const auto& r : report.rows) CHECK(r.normalized_residual == doctest::Approx(std::pow(0.8, r.t)));
  CHECK(report.median_tail_ratio == doctest::Approx(0.8));
}

TEST_CASE("identical starting points stay in consensus") {
  auto cfg = least_squares_instance(random_strongly_connected(5, 0.3, 1), 3, 3, 0.05, 0, 1);
  for (auto& x : cfg.x0) x = cfg.x0.front();
  const auto mixer = make_mixer(cfg.graph);
  Session session(cfg.graph, 1);
  ObjectiveSet objectives;
  for (const auto& f : cfg.objectives) objectives.push_back(std::make_shared<LeastSquaresObjective>(f));
  OptimizerState s;
  s.x = cfg.x0;
  s.eta = cfg.eta;
  const auto next = gd_step(s, mixer, session, objectives);
  for (const auto& x : next.x) CHECK((x - next.x.front()).norm() < 1e-12);
  CHECK(next.t == 1);
}

TEST_CASE("stepsize far above the sufficient bound is reported") {
  auto cfg = least_squares_instance(DiGraph::ring(3), 3, 3, 0.1, 30, 5);
  ObjectiveSet set;
  for (const auto& f : cfg.objectives) set.push_back(std::make_shared<LeastSquaresObjective>(f));
  cfg.eta = 10 * stepsize_bound(set);
  const auto report = run(cfg);
  CHECK_FALSE(report.stepsize_within_bound);
  CHECK(report.stepsize_bound == doctest::Approx(stepsize_bound(set)));
}

TEST_CASE("objective contract holds on random pairs") {
  const auto cfg = least_squares_instance(DiGraph::ring(2), 4, 3, 0.1, 0, 8);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> d(0, 1);
  for (const auto& f : cfg.objectives)
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd x(3), y(3);
      for (int i = 0; i < 3; ++i) x(i) = d(rng), y(i) = d(rng);
      const Eigen::VectorXd dg = f.gradient(x) - f.gradient(y);
      const double dx = (x - y).squaredNorm();
      CHECK(dg.dot(x - y) >= f.strong_convexity() * dx * (1 - 1e-12));
      CHECK(dg.norm() <= f.lipschitz() * std::sqrt(dx) * (1 + 1e-12));
    }
}
