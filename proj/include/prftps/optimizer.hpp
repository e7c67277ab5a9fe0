#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "prftps/digraph.hpp"
#include "prftps/prftps.hpp"

namespace prftps {

class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  virtual double strong_convexity() const = 0;  // mu
  virtual double lipschitz() const = 0;         // L
};

// f(x) = ||A x - b||^2, mu = 2 lambda_min(A^T A), L = 2 lambda_max(A^T A).
class LeastSquaresObjective final : public Objective {
 public:
  LeastSquaresObjective(Eigen::MatrixXd a, Eigen::VectorXd b);

  std::size_t dimension() const override { return static_cast<std::size_t>(a_.cols()); }
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  double strong_convexity() const override { return mu_; }
  double lipschitz() const override { return l_; }

  const Eigen::MatrixXd& a() const noexcept { return a_; }
  const Eigen::VectorXd& b() const noexcept { return b_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  double mu_ = 0;
  double l_ = 0;
};

using ObjectiveSet = std::vector<std::shared_ptr<const Objective>>;

// Minimizer of sum_i ||A_i x - b_i||^2 via the normal equations.
Eigen::VectorXd least_squares_optimum(const std::vector<LeastSquaresObjective>& objectives);

// Row-stochastic mixing matrix abar(i, j) = 1/(1+|N_i^-|) on N_i^- and {i}.
struct RowStochasticMixer {
  Eigen::MatrixXd abar;
  Eigen::VectorXd perron_left;  // u with u^T abar = u^T, u >= 0, u^T 1 = n
  double contraction = 0;       // rho(abar - 1 u^T / n)
};

RowStochasticMixer make_mixer(const DiGraph& g);

// Spectral radius of a dense real matrix.
double spectral_radius(const Eigen::MatrixXd& m);

struct OptimizerState {
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> y;
  std::uint64_t t = 0;
  double eta = 0.1;
  std::uint64_t rounds = 0;   // cumulative communication rounds
  double y_error = 0;         // max_i ||y_i - mean gradient|| of the last step, relative
};

// y_i(t) <- PrFTPS average of grad f_i(x_i(t)); x_i(t+1) = sum_j abar_ij x_j(t) - eta y_i(t).
OptimizerState gd_step(const OptimizerState& state, const RowStochasticMixer& mixer, Session& session,
                       const ObjectiveSet& objectives);

// 1/(mu+L) with mu = min_i mu_i and L = max_i L_i.
double stepsize_bound(const ObjectiveSet& objectives);

struct ConvergenceRow {
  std::uint64_t t = 0;
  std::uint64_t rounds_cumulative = 0;
  double normalized_residual = 0;  // (1/n) sum_i ||x_i(t)-x*|| / ||x_i(0)-x*||
  double consensus_error = 0;      // ||x(t) - 1 (x) xbar(t)||, xbar = u^T x / n
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::uint64_t first_stage_rounds = 0;  // k_1
  std::uint64_t k_max = 0;
  double stepsize_bound = 0;
  bool stepsize_within_bound = true;
  double rate_slope = 0;          // least-squares slope of log residual vs t (points above 1e-12)
  double median_tail_ratio = 0;   // median of r(t+1)/r(t) over the tail above 1e-12
  bool monotone = true;           // residual never increased
  double max_gradient_error = 0;  // worst y_i vs centralized mean gradient, relative
  double final_optimality_error = 0;  // max_i ||x_i(T)-x*|| / (1 + ||x*||)
  std::uint64_t total_rounds = 0;
};

struct GdConfig {
  DiGraph graph{1};
  std::vector<LeastSquaresObjective> objectives;
  std::vector<Eigen::VectorXd> x0;
  double eta = 0.1;
  std::uint64_t steps = 200;  // T
  std::uint64_t seed = 1;
  SessionOptions session;
};

// Standard-normal A_i (q x p), b_i and x_i(0), seeded.
GdConfig least_squares_instance(const DiGraph& g, std::size_t q, std::size_t p, double eta, std::uint64_t steps,
                                std::uint64_t seed);

ConvergenceReport run(const GdConfig& config);

}  // namespace prftps
