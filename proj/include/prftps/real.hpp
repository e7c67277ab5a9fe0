#pragma once

// Working precision for the consensus dynamics and minimal-polynomial
// extraction. Difference-Hankel matrices of these trajectories are extremely
// ill-conditioned before their first defect, so double precision cannot tell
// a true defect from a merely small singular value.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <vector>

namespace prftps {

using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>,
                                           boost::multiprecision::et_off>;

using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

inline double to_double(const Real& v) { return static_cast<double>(v); }

inline Eigen::MatrixXd to_double(const RealMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = static_cast<double>(m(r, c));
  return out;
}

// Default relative rank tolerance, matched to the 100-digit working precision.
inline const Real kDefaultRankTolerance{"1e-50"};

}  // namespace prftps
