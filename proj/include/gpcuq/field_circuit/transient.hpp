#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "gpcuq/errors.hpp"
#include "gpcuq/field_circuit/coupled.hpp"

namespace gpcuq::fc {

struct NewtonOptions {
  /// Bound on the scaled residual; see scaled_residual_norm.
  double tolerance = 1e-10;
  int max_iterations = 50;
  int max_halvings = 10;
};

struct TransientOptions {
  double t_end = 0.04;
  double dt = 1e-4;
  /// Record every n-th step (step 0 is the initial state).
  int output_stride = 1;
  NewtonOptions newton;
  bool keep_states = false;
};

struct TransientResult {
  std::vector<double> times;
  std::vector<double> qoi;
  std::vector<Eigen::VectorXd> states;  ///< only with keep_states
  long total_iterations = 0;
  int max_step_iterations = 0;
  /// Largest r_{n+1} / r_n^2 over Newton iterations with r_n < 1e-2 and
  /// r_{n+1} above 100x the tolerance (rounding noise excluded). Bounded under
  /// quadratic convergence.
  double quadratic_constant = 0.0;
  /// Median of log(r_{n+1}/r_n) / log(r_n/r_{n-1}) over the same iterations.
  double median_convergence_order = 0.0;
};

/// max_i |r_i| / s_i where s_i is the sum of absolute values of the terms that
/// make up row i, floored at 1e-3 of the largest such sum in the same block of
/// the state layout. Rows whose terms are all negligible are therefore
/// measured against the block's scale rather than their own rounding noise.
inline Eigen::VectorXd residual_row_scale(const StateLayout& layout, const Eigen::VectorXd& mag) {
  const int bounds[] = {layout.u0(), layout.jl0(), layout.jv0(), layout.jm0(), layout.a0(), layout.size()};
  Eigen::VectorXd scale(mag.size());
  for (int b = 0; b + 1 < 6; ++b) {
    const int lo = bounds[b], hi = bounds[b + 1];
    if (hi <= lo) continue;
    const double floor = 1e-3 * mag.segment(lo, hi - lo).maxCoeff();
    for (int i = lo; i < hi; ++i) scale(i) = std::max({mag(i), floor, std::numeric_limits<double>::min()});
  }
  return scale;
}

inline double scaled_residual_norm(const StateLayout& layout, const Eigen::VectorXd& r, const Eigen::VectorXd& mag) {
  return r.cwiseQuotient(residual_row_scale(layout, mag)).cwiseAbs().maxCoeff();
}

/// Newton linear solver for the coupled Jacobian
///   [ C  B ] [dc]   [rc]
///   [ E  K ] [da] = [ra]
/// where K, the field block, is symmetric. K is factorized by sparse LDL^T
/// (pattern analyzed once) and the small circuit Schur complement
/// C - B K^{-1} E is solved densely with full pivoting.
class CoupledLinearSolver {
 public:
  explicit CoupledLinearSolver(const StateLayout& layout) : nc_(layout.a0()), nf_(layout.fem) {}

  /// Factorizes; throws ConvergenceError when the Jacobian is numerically singular.
  void factorize(const Eigen::SparseMatrix<double>& jac) {
    const Eigen::SparseMatrix<double> k = jac.bottomRightCorner(nf_, nf_);
    b_ = jac.topRightCorner(nc_, nf_);
    e_ = jac.bottomLeftCorner(nf_, nc_);
    const Eigen::MatrixXd c = Eigen::MatrixXd(jac.topLeftCorner(nc_, nc_));
    if (nf_ > 0) {
      if (!analyzed_) {
        ldlt_.analyzePattern(k);
        analyzed_ = true;
      }
      ldlt_.factorize(k);
      if (ldlt_.info() != Eigen::Success) throw ConvergenceError("singular field block");
      kinv_e_ = ldlt_.solve(Eigen::MatrixXd(e_));
    } else {
      kinv_e_.setZero(0, nc_);
    }
    schur_.compute(c - b_ * kinv_e_);
    if (schur_.rank() < nc_) throw ConvergenceError("singular circuit Schur complement");
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& r) const {
    Eigen::VectorXd dx(nc_ + nf_);
    if (nf_ == 0) {
      dx = schur_.solve(r);
      return dx;
    }
    const Eigen::VectorXd kinv_ra = ldlt_.solve(r.tail(nf_));
    dx.head(nc_) = schur_.solve(r.head(nc_) - b_ * kinv_ra);
    dx.tail(nf_) = kinv_ra - kinv_e_ * dx.head(nc_);
    return dx;
  }

 private:
  int nc_, nf_;
  bool analyzed_ = false;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  Eigen::SparseMatrix<double> b_, e_;
  Eigen::MatrixXd kinv_e_;
  Eigen::FullPivLU<Eigen::MatrixXd> schur_;
};

/// max over state-layout blocks of ||r_block||_inf / max(mag_block): a
/// coarser measure than scaled_residual_norm, used to detect residual growth
/// in the line search.
inline double block_residual_norm(const StateLayout& layout, const Eigen::VectorXd& r, const Eigen::VectorXd& mag) {
  const int bounds[] = {layout.u0(), layout.jl0(), layout.jv0(), layout.jm0(), layout.a0(), layout.size()};
  double worst = 0.0;
  for (int b = 0; b + 1 < 6; ++b) {
    const int lo = bounds[b], hi = bounds[b + 1];
    if (hi <= lo) continue;
    const double scale = std::max(mag.segment(lo, hi - lo).maxCoeff(), std::numeric_limits<double>::min());
    worst = std::max(worst, r.segment(lo, hi - lo).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

/// Implicit-Euler integration from the zero state on [0, t_end] with a full
/// Newton solve per step. `qoi` maps a state to the scalar output; it is
/// sampled at t = 0 and at every output_stride-th step.
inline TransientResult solve_transient(const CoupledSystem& sys, const TransientOptions& opt,
                                       const std::function<double(const Eigen::VectorXd&)>& qoi) {
  if (!(opt.dt > 0.0) || !(opt.t_end > 0.0)) throw DomainError("solve_transient: t_end and dt must be positive");
  if (opt.output_stride < 1) throw DomainError("solve_transient: output_stride must be >= 1");
  const long steps = std::lround(opt.t_end / opt.dt);
  if (steps < 1 || std::abs(steps * opt.dt - opt.t_end) > 1e-9 * opt.t_end) {
    throw DomainError("solve_transient: t_end must be an integer multiple of dt");
  }
  if (steps % opt.output_stride != 0) throw DomainError("solve_transient: step count not divisible by output_stride");

  const StateLayout& layout = sys.layout();
  const int n = layout.size();
  TransientResult result;
  Eigen::VectorXd x_prev = Eigen::VectorXd::Zero(n);
  auto record = [&](double t, const Eigen::VectorXd& x) {
    result.times.push_back(t);
    result.qoi.push_back(qoi(x));
    if (opt.keep_states) result.states.push_back(x);
  };
  record(0.0, x_prev);

  CoupledLinearSolver linear(layout);
  Eigen::VectorXd r, mag, r_try, mag_try;
  Eigen::SparseMatrix<double> jac;
  std::vector<double> order_samples;

  for (long step = 1; step <= steps; ++step) {
    const double t = step * opt.dt;
    Eigen::VectorXd x = x_prev;
    std::vector<double> history;
    bool converged = false;
    for (int it = 0; it <= opt.newton.max_iterations; ++it) {
      sys.evaluate(x, x_prev, opt.dt, t, r, mag, &jac);
      const double norm = scaled_residual_norm(layout, r, mag);
      history.push_back(norm);
      // below 1e3 tol, a residual that stops contracting has hit rounding noise
      const bool stalled = history.size() >= 2 && norm < 1e3 * opt.newton.tolerance &&
                           norm > 0.5 * history[history.size() - 2];
      if (norm < opt.newton.tolerance || stalled) {
        converged = true;
        result.total_iterations += it;
        result.max_step_iterations = std::max(result.max_step_iterations, it);
        break;
      }
      if (it == opt.newton.max_iterations) break;

      try {
        linear.factorize(jac);
      } catch (const ConvergenceError& e) {
        throw ConvergenceError("solve_transient: singular Jacobian at t = " + std::to_string(t) + ": " + e.what());
      }
      const Eigen::VectorXd dx = linear.solve(r);

      // Junction limiting caps the step; the step is then halved while the
      // trial residual is non-finite or larger than the current one.
      const double growth_ref = block_residual_norm(layout, r, mag);
      double alpha = sys.junction_step_limit(x, dx);
      Eigen::VectorXd x_try;
      for (int h = 0;; ++h) {
        x_try = x - alpha * dx;
        double norm_try = std::numeric_limits<double>::infinity();
        try {
          sys.evaluate(x_try, x_prev, opt.dt, t, r_try, mag_try, nullptr);
          norm_try = block_residual_norm(layout, r_try, mag_try);
        } catch (const ConvergenceError&) {
          if (h >= opt.newton.max_halvings) throw;
        }
        if (norm_try <= growth_ref || h >= opt.newton.max_halvings) break;
        alpha *= 0.5;
      }
      x = std::move(x_try);
    }
    if (!converged) {
      std::ostringstream os;
      os << "Newton did not converge at t = " << t << " after " << opt.newton.max_iterations
         << " iterations; scaled residuals:";
      for (double h : history) os << ' ' << h;
      throw ConvergenceError(os.str());
    }
    const double floor = 1e2 * opt.newton.tolerance;
    for (std::size_t k = 1; k < history.size(); ++k) {
      const double r1 = history[k - 1], r2 = history[k];
      if (r1 < 1e-2 && r2 > floor) {
        result.quadratic_constant = std::max(result.quadratic_constant, r2 / (r1 * r1));
        const double r0 = k >= 2 ? history[k - 2] : 0.0;
        if (k >= 2 && r1 < r0 && r2 < r1) order_samples.push_back(std::log(r2 / r1) / std::log(r1 / r0));
      }
    }
    x_prev = std::move(x);
    if (step % opt.output_stride == 0) record(t, x_prev);
  }
  if (!order_samples.empty()) {
    auto mid = order_samples.begin() + static_cast<std::ptrdiff_t>(order_samples.size() / 2);
    std::nth_element(order_samples.begin(), mid, order_samples.end());
    result.median_convergence_order = *mid;
  }
  return result;
}

}  // namespace gpcuq::fc
