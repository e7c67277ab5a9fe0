#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "prftps/real.hpp"

namespace prftps {

// Minimal-polynomial data extracted at one node.
struct PolyCoefficients {
  std::size_t degree = 0;      // D_j
  std::vector<Real> beta;      // length D_j + 1, unit norm, first significant entry > 0
  std::size_t defect_round = 0;  // samples held when the defect was detected: 2(D_j+1)+1
};

// element m = samples[m+1] - samples[m]
std::vector<Real> difference_sequence(std::span<const Real> samples);

// (order+1) x (order+1) matrix with entry (r, c) = s[r + c].
RealMatrix hankel_matrix(std::span<const Real> s, std::size_t order);

struct RankProbe {
  bool deficient = false;
  Real ratio = 0;  // smallest / largest pivot magnitude of a full-pivot LU
};

// Rank-deficiency test, scale invariant: deficient iff ratio < tol (a zero
// matrix is deficient with ratio 0).
RankProbe probe_rank(const RealMatrix& m, const Real& tol);

// Unit-norm kernel vector of a matrix whose numerical nullity (at `tol`) is
// exactly one; nullopt otherwise. Sign fixed so the first significant entry
// is positive.
std::optional<std::vector<Real>> unique_kernel(const RealMatrix& m, const Real& tol);

// max_s |sum_m beta[m] * seq[m+s]| / max|seq| (0 for an all-zero sequence).
Real annihilation_residual(std::span<const Real> seq, std::span<const Real> beta);

// Number of raw samples a node must hold before it tests Hankel dimension d.
constexpr std::size_t samples_for_dimension(std::size_t dim) { return 2 * dim + 1; }

// Tests one Hankel dimension on the l=1 (`values`) and l=2 (`mass`)
// trajectories. Returns the coefficients when both difference-Hankel matrices
// are defective; nullopt when dimension `dim` is still regular for at least
// one of them. Throws Error(degenerate) when the l=1 matrix loses rank before
// the l=2 one, or when its kernel does not annihilate the l=2 differences.
std::optional<PolyCoefficients> check_dimension(std::span<const Real> values, std::span<const Real> mass,
                                                std::size_t dim, const Real& tol);

// Smallest defective dimension over all dimensions the data supports;
// nullopt ("not yet") when more samples are needed.
std::optional<PolyCoefficients> first_defect(std::span<const Real> values, std::span<const Real> mass,
                                             const Real& tol);

// (x_1(1..D+1) . beta) / (x_2(1..D+1) . beta)
Real final_value(std::span<const Real> values, std::span<const Real> mass, const PolyCoefficients& poly,
                 const Real& tol);

}  // namespace prftps
