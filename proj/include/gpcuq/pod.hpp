#pragma once

// Proper orthogonal decomposition of chaos-coefficient snapshots.
//
// The snapshot matrix W (m x k) collects the coefficient vectors w(t_0) ...
// w(t_{k-1}) as columns, without centering. Its leading left singular vectors
// P_r = (u_1 ... u_r) rotate the orthonormal chaos basis into a smaller
// orthonormal basis Psi_j = sum_i u_ij Phi_i, and the reduced coefficients are
// P_r^T w(t).

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "gpcuq/chaos_basis.hpp"
#include "gpcuq/collocation.hpp"
#include "gpcuq/errors.hpp"
#include "gpcuq/stochastic_space.hpp"

namespace gpcuq {

struct PodBasis {
  Eigen::MatrixXd projection;       ///< m x r, orthonormal columns
  Eigen::VectorXd singular_values;  ///< all min(m,k) values, nonincreasing
  Eigen::Index r = 0;
};

struct ReducedTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd reduced;  ///< r x k
};

/// Thin SVD of the snapshots. Each left singular vector is flipped so that its
/// largest-magnitude entry is positive (first such entry on ties).
struct SnapshotSvd {
  Eigen::MatrixXd u;  ///< m x min(m,k)
  Eigen::VectorXd sigma;
};

inline SnapshotSvd snapshot_svd(const Eigen::Ref<const Eigen::MatrixXd>& w) {
  if (w.size() == 0) throw DimensionError("pod: empty snapshot matrix");
  if (!w.allFinite()) throw NumericalError("pod: snapshot matrix has non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("pod: SVD did not converge (m=" + std::to_string(w.rows()) + ", k=" +
                         std::to_string(w.cols()) + ", max|w|=" + std::to_string(w.cwiseAbs().maxCoeff()) + ")");
  }
  SnapshotSvd out{svd.matrixU(), svd.singularValues()};
  for (Eigen::Index j = 0; j < out.u.cols(); ++j) {
    Eigen::Index arg = 0;
    out.u.col(j).cwiseAbs().maxCoeff(&arg);
    if (out.u(arg, j) < 0.0) out.u.col(j) *= -1.0;
  }
  return out;
}

inline std::pair<PodBasis, ReducedTrajectory> pod(const CoefficientTrajectory& c, Eigen::Index r) {
  const Eigen::Index limit = std::min(c.rows(), c.cols());
  if (r < 1 || r > limit) {
    throw DimensionError("pod: r = " + std::to_string(r) + " outside [1, " + std::to_string(limit) + "]");
  }
  SnapshotSvd svd = snapshot_svd(c.coeffs);
  PodBasis basis{svd.u.leftCols(r), std::move(svd.sigma), r};
  ReducedTrajectory reduced{c.times, basis.projection.transpose() * c.coeffs};
  if (!(basis.projection * reduced.reduced).allFinite()) throw NumericalError("pod: non-finite reconstruction");
  return {std::move(basis), std::move(reduced)};
}

/// Psi_j(p) = sum_i u_ij Phi_i(reference(p)), j = 1..r.
inline Eigen::VectorXd rotated_basis_eval(const PodBasis& basis, const IndexSet& set, const ParameterSpace& space,
                                          const Eigen::VectorXd& p) {
  if (static_cast<Eigen::Index>(set.size()) != basis.projection.rows()) {
    throw ShapeError("rotated_basis_eval: index set size differs from projection rows");
  }
  return basis.projection.transpose() * eval_basis(set, space.to_reference(p));
}

/// Low-dimensional surrogate sum_j wbar_j(t) Psi_j(p).
inline double reduced_surrogate_eval(const PodBasis& basis, const ReducedTrajectory& reduced, const IndexSet& set,
                                     const ParameterSpace& space, std::size_t t_index, const Eigen::VectorXd& p) {
  return reduced.reduced.col(static_cast<Eigen::Index>(t_index)).dot(rotated_basis_eval(basis, set, space, p));
}

struct PodErrorPoint {
  Eigen::Index r = 0;
  double max_relative_error = 0.0;
};

/// Per-snapshot relative errors ||w - P_r P_r^T w|| / ||w||, one row per r in
/// r_list. All-zero snapshots get NaN.
inline Eigen::MatrixXd pod_column_errors(const Eigen::Ref<const Eigen::MatrixXd>& w,
                                         const std::vector<Eigen::Index>& r_list) {
  const Eigen::Index limit = std::min(w.rows(), w.cols());
  for (Eigen::Index r : r_list) {
    if (r < 1 || r > limit) {
      throw DimensionError("pod_error_curve: r = " + std::to_string(r) + " outside [1, " + std::to_string(limit) + "]");
    }
  }
  // Every snapshot lies in the span of U, so its squared residual after rank r
  // is the tail sum of its squared coordinates (U^T w)_j, j > r.
  const SnapshotSvd svd = snapshot_svd(w);
  const Eigen::MatrixXd coords = svd.u.transpose() * w;
  const Eigen::Index n = coords.rows();
  Eigen::MatrixXd tail = Eigen::MatrixXd::Zero(n + 1, w.cols());
  for (Eigen::Index j = n; j-- > 0;) tail.row(j) = tail.row(j + 1) + coords.row(j).cwiseAbs2();
  Eigen::MatrixXd errors(static_cast<Eigen::Index>(r_list.size()), w.cols());
  for (std::size_t a = 0; a < r_list.size(); ++a) {
    for (Eigen::Index t = 0; t < w.cols(); ++t) {
      const double norm = w.col(t).norm();
      errors(static_cast<Eigen::Index>(a), t) =
          norm > 0.0 ? std::sqrt(tail(r_list[a], t)) / norm : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return errors;
}

/// Maximum over snapshots of the relative L2 error of the rank-r approximation,
/// for each r. By Parseval the coefficient 2-norm equals the L2 norm of the
/// surrogate, so this is the function-space error.
inline std::vector<PodErrorPoint> pod_error_curve(const Eigen::Ref<const Eigen::MatrixXd>& w,
                                                  const std::vector<Eigen::Index>& r_list) {
  const Eigen::MatrixXd errors = pod_column_errors(w, r_list);
  std::vector<PodErrorPoint> curve;
  for (std::size_t a = 0; a < r_list.size(); ++a) {
    double worst = 0.0;
    for (Eigen::Index t = 0; t < errors.cols(); ++t) {
      const double e = errors(static_cast<Eigen::Index>(a), t);
      if (!std::isnan(e)) worst = std::max(worst, e);
    }
    curve.push_back({r_list[a], worst});
  }
  return curve;
}

inline std::vector<PodErrorPoint> pod_error_curve(const CoefficientTrajectory& c,
                                                  const std::vector<Eigen::Index>& r_list) {
  return pod_error_curve(c.coeffs, r_list);
}

}  // namespace gpcuq
