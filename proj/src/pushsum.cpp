#include "prftps/pushsum.hpp"

#include "prftps/error.hpp"

namespace prftps {

BaselineState baseline_start(std::span<const double> initial) {
  BaselineState s;
  s.value.assign(initial.begin(), initial.end());
  s.mass.assign(initial.size(), 1.0);
  return s;
}

BaselineState baseline_push_sum_round(const BaselineState& state, const NeighborSets& nbrs) {
  const auto n = nbrs.size();
  if (state.value.size() != n || state.mass.size() != n)
    throw Error(ErrorCode::invalid_argument, "baseline state size does not match graph");
  BaselineState next{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  // Push form: node j splits its pair evenly over N_j^+ and itself.
  for (std::size_t j = 0; j < n; ++j) {
    const double w = 1.0 / (1.0 + static_cast<double>(nbrs.out_degree[j]));
    next.value[j] += w * state.value[j];
    next.mass[j] += w * state.mass[j];
    for (auto i : nbrs.out[j]) {
      next.value[i] += w * state.value[j];
      next.mass[i] += w * state.mass[j];
    }
  }
  return next;
}

std::vector<double> baseline_ratios(const BaselineState& state) {
  std::vector<double> r(state.value.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = state.value[i] / state.mass[i];
  return r;
}

WeightSet make_weights(const NeighborSets& nbrs, WeightPhase phase, Rng& rng, double range) {
  const auto n = nbrs.size();
  WeightSet w;
  w.phase = phase;
  w.p = RealMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  w.a_alpha_beta.resize(n);
  w.a_beta_alpha.resize(n);
  w.a_beta_beta.resize(n);

  if (phase == WeightPhase::steady) {
    const Real half = Real(1) / 2;
    for (std::size_t i = 0; i < n; ++i) {
      const Real share = Real(1) / (2 + nbrs.out_degree[i]);
      const auto col = static_cast<Eigen::Index>(i);
      w.p(col, col) = share;
      for (auto j : nbrs.out[i]) w.p(static_cast<Eigen::Index>(j), col) = share;
      w.a_beta_alpha[i] = share;
      w.a_alpha_beta[i] = half;
      w.a_beta_beta[i] = half;
    }
    return w;
  }

  if (!(range > 0.0)) throw Error(ErrorCode::invalid_argument, "weight range must be positive");
  std::uniform_real_distribution<double> draw(-range, range);
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    Real sum = 0;
    w.p(col, col) = Real(draw(rng));
    sum += w.p(col, col);
    for (auto j : nbrs.out[i]) {
      w.p(static_cast<Eigen::Index>(j), col) = Real(draw(rng));
      sum += w.p(static_cast<Eigen::Index>(j), col);
    }
    // Residual goes to the last summand so the column constraint is exact.
    w.a_beta_alpha[i] = 1 - sum;
    w.a_alpha_beta[i] = 1;
    w.a_beta_beta[i] = 0;
  }
  return w;
}

WeightSet make_weights(const NeighborSets& nbrs, WeightPhase phase, std::uint64_t seed, double range) {
  Rng rng(seed);
  return make_weights(nbrs, phase, rng, range);
}

Real column_sum_defect(const WeightSet& w) {
  Real worst = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Real alpha_col = w.p.col(static_cast<Eigen::Index>(i)).sum() + w.a_beta_alpha[i];
    const Real beta_col = w.a_alpha_beta[i] + w.a_beta_beta[i];
    worst = std::max(worst, Real(abs(alpha_col - 1)));
    worst = std::max(worst, Real(abs(beta_col - 1)));
  }
  return worst;
}

NetworkState decomposed_round(const NetworkState& states, const WeightSet& w, const NeighborSets& nbrs) {
  const auto n = nbrs.size();
  if (states.size() != n || w.size() != n)
    throw Error(ErrorCode::invalid_argument, "state/weight size does not match graph");
  NetworkState next = states;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const auto channels = states[i].channels();
    for (std::size_t c = 0; c < channels; ++c) {
      Real alpha = w.p(row, row) * states[i].alpha[c] + w.a_alpha_beta[i] * states[i].beta[c];
      for (auto j : nbrs.in[i]) alpha += w.p(row, static_cast<Eigen::Index>(j)) * states[j].alpha[c];
      next[i].alpha[c] = alpha;
      next[i].beta[c] = w.a_beta_alpha[i] * states[i].alpha[c] + w.a_beta_beta[i] * states[i].beta[c];
      next[i].alpha_history[c].push_back(alpha);
    }
  }
  return next;
}

Real channel_total(const NetworkState& states, std::size_t channel) {
  Real total = 0;
  for (const auto& s : states) total += s.alpha.at(channel) + s.beta.at(channel);
  return total;
}

RealMatrix stacked_matrix(const WeightSet& w) {
  if (w.phase != WeightPhase::steady)
    throw Error(ErrorCode::invalid_argument, "stacked matrix is defined for steady-phase weights only");
  const auto n = static_cast<Eigen::Index>(w.size());
  RealMatrix m = RealMatrix::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = w.p;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    m(i, n + i) = w.a_alpha_beta[k];
    m(n + i, i) = w.a_beta_alpha[k];
    m(n + i, n + i) = w.a_beta_beta[k];
  }
  return m;
}

RealVector stack_channel(const NetworkState& states, std::size_t channel) {
  const auto n = static_cast<Eigen::Index>(states.size());
  RealVector v(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = states[static_cast<std::size_t>(i)].alpha.at(channel);
    v(n + i) = states[static_cast<std::size_t>(i)].beta.at(channel);
  }
  return v;
}

}  // namespace prftps
