#include "prftps/hankel.hpp"

#include <algorithm>
#include <string>

#include "prftps/error.hpp"

namespace prftps {

std::vector<Real> difference_sequence(std::span<const Real> samples) {
  if (samples.size() < 2)
    throw Error(ErrorCode::insufficient_data, "difference sequence needs at least two samples");
  std::vector<Real> d(samples.size() - 1);
  for (std::size_t m = 0; m + 1 < samples.size(); ++m) d[m] = samples[m + 1] - samples[m];
  return d;
}

RealMatrix hankel_matrix(std::span<const Real> s, std::size_t order) {
  if (s.size() < 2 * order + 1)
    throw Error(ErrorCode::insufficient_data, "Hankel matrix of order " + std::to_string(order) + " needs " +
                                                  std::to_string(2 * order + 1) + " elements, got " +
                                                  std::to_string(s.size()));
  const auto dim = static_cast<Eigen::Index>(order + 1);
  RealMatrix h(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) h(r, c) = s[static_cast<std::size_t>(r + c)];
  return h;
}

RankProbe probe_rank(const RealMatrix& m, const Real& tol) {
  Eigen::FullPivLU<RealMatrix> lu(m);
  const auto diag = lu.matrixLU().diagonal();
  Real largest = 0;
  Real smallest = 0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    const Real a = abs(diag(i));
    largest = std::max(largest, a);
    smallest = (i == 0) ? a : std::min(smallest, a);
  }
  if (largest == 0) return {true, Real(0)};
  const Real ratio = smallest / largest;
  return {ratio < tol, ratio};
}

std::optional<std::vector<Real>> unique_kernel(const RealMatrix& m, const Real& tol) {
  const auto dim = m.cols();
  if (dim == 0) return std::nullopt;
  Eigen::FullPivLU<RealMatrix> lu(m);
  lu.setThreshold(tol);
  RealMatrix k = lu.kernel();
  if (k.cols() != 1 || lu.rank() != dim - 1) return std::nullopt;

  std::vector<Real> beta(static_cast<std::size_t>(dim));
  Real norm = 0;
  Real peak = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    norm += k(i, 0) * k(i, 0);
    peak = std::max(peak, Real(abs(k(i, 0))));
  }
  norm = sqrt(norm);
  if (norm == 0) return std::nullopt;
  Real sign = 1;
  const Real significant = peak * Real("1e-20");
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (abs(k(i, 0)) > significant) {
      sign = k(i, 0) > 0 ? 1 : -1;
      break;
    }
  }
  for (Eigen::Index i = 0; i < dim; ++i) beta[static_cast<std::size_t>(i)] = sign * k(i, 0) / norm;
  return beta;
}

Real annihilation_residual(std::span<const Real> seq, std::span<const Real> beta) {
  Real scale = 0;
  for (const auto& v : seq) scale = std::max(scale, Real(abs(v)));
  if (scale == 0 || beta.empty() || seq.size() < beta.size()) return 0;
  Real worst = 0;
  for (std::size_t s = 0; s + beta.size() <= seq.size(); ++s) {
    Real acc = 0;
    for (std::size_t m = 0; m < beta.size(); ++m) acc += beta[m] * seq[m + s];
    worst = std::max(worst, Real(abs(acc)));
  }
  return worst / scale;
}

std::optional<PolyCoefficients> check_dimension(std::span<const Real> values, std::span<const Real> mass,
                                                std::size_t dim, const Real& tol) {
  if (dim == 0) throw Error(ErrorCode::invalid_argument, "Hankel dimension must be positive");
  const auto needed = samples_for_dimension(dim);
  if (values.size() < needed || mass.size() < needed)
    throw Error(ErrorCode::insufficient_data, "dimension " + std::to_string(dim) + " needs " +
                                                  std::to_string(needed) + " samples per trajectory");

  // 2*dim samples give the 2*dim-1 differences a dim x dim Hankel matrix uses.
  const auto d1 = difference_sequence(values.first(2 * dim));
  const auto d2 = difference_sequence(mass.first(2 * dim));
  const auto h1 = hankel_matrix(d1, dim - 1);
  const auto h2 = hankel_matrix(d2, dim - 1);
  const auto p1 = probe_rank(h1, tol);
  const auto p2 = probe_rank(h2, tol);

  if (!p1.deficient && !p2.deficient) return std::nullopt;
  // The mass iteration starts from the same state at every node, so on
  // symmetric graphs it can lose rank early; wait for the value iteration.
  if (!p1.deficient) return std::nullopt;
  if (!p2.deficient)
    throw Error(ErrorCode::degenerate,
                "value trajectory lost rank at dimension " + std::to_string(dim) + " before the mass trajectory");

  auto beta = unique_kernel(h1, tol);
  if (!beta) throw Error(ErrorCode::degenerate, "kernel of the first defective Hankel matrix is not unique");
  const auto d2_all = difference_sequence(mass);
  if (annihilation_residual(d2_all, *beta) > tol)
    throw Error(ErrorCode::degenerate, "value-trajectory kernel does not annihilate the mass differences");

  return PolyCoefficients{dim - 1, std::move(*beta), needed};
}

std::optional<PolyCoefficients> first_defect(std::span<const Real> values, std::span<const Real> mass,
                                             const Real& tol) {
  const auto available = std::min(values.size(), mass.size());
  for (std::size_t dim = 1; samples_for_dimension(dim) <= available; ++dim) {
    if (auto poly = check_dimension(values, mass, dim, tol)) return poly;
  }
  return std::nullopt;
}

Real final_value(std::span<const Real> values, std::span<const Real> mass, const PolyCoefficients& poly,
                 const Real& tol) {
  const auto terms = poly.degree + 1;
  if (poly.beta.size() != terms) throw Error(ErrorCode::invalid_argument, "beta length must be degree + 1");
  if (values.size() < terms || mass.size() < terms)
    throw Error(ErrorCode::insufficient_data, "final value needs " + std::to_string(terms) + " samples");
  Real num = 0;
  Real den = 0;
  Real scale = 0;
  for (std::size_t m = 0; m < terms; ++m) {
    num += values[m] * poly.beta[m];
    den += mass[m] * poly.beta[m];
    scale = std::max(scale, Real(abs(mass[m])));
  }
  if (abs(den) <= tol * scale)
    throw Error(ErrorCode::divide_by_zero, "mass dot product vanished; coefficients are degenerate");
  return num / den;
}

}  // namespace prftps
