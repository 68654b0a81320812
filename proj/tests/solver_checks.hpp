#pragma once

// Field-circuit solver checks shared by the unit tests and the acceptance run.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "gpcuq/field_circuit/rectifier.hpp"
#include "gpcuq/field_circuit/transient.hpp"

namespace checks {

using namespace gpcuq::fc;

/// Integral of u over the unit square where -laplace(u) = 1, u = 0 on the
/// boundary, from the double sine series (64/pi^6) sum_{m,n odd} 1/(m^2 n^2 (m^2+n^2)).
inline double unit_square_poisson_integral() {
  const double pi = std::numbers::pi;
  double s = 0.0;
  for (int m = 1; m < 4000; m += 2)
    for (int n = 1; n < 4000; n += 2) s += 1.0 / (double(m) * m * n * n * (double(m) * m + double(n) * n));
  return 64.0 / std::pow(pi, 6) * s;
}

/// Closed-form inductance of a uniformly wound square core with A = 0 on its
/// boundary: L = depth N^2 c / nu; independent of the side length.
inline double square_core_inductance(const SquareCoreConfig& cfg) {
  return cfg.depth * cfg.turns * cfg.turns * unit_square_poisson_integral() / cfg.reluctivity;
}

/// Discrete inductance X^T K^{-1} X of the linear square-core model.
inline double fem_inductance(const CoupledSystem& sys) {
  const auto& g = *sys.field().geometry;
  const FemAssembly fa = fem_assemble(sys.field(), Eigen::VectorXd::Zero(g.num_dofs()), Eigen::VectorXd::Zero(1));
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(fa.jacobian);
  const Eigen::VectorXd x = g.coupling().col(0);
  return x.dot(ldlt.solve(x));
}

inline TransientResult rl_run(const SquareCoreConfig& cfg, double t_end, double dt, bool keep_states = false) {
  const CoupledSystem sys = square_core_rl_system(cfg);
  TransientOptions opt;
  opt.t_end = t_end;
  opt.dt = dt;
  opt.keep_states = keep_states;
  const int jm = sys.layout().jm0();
  return solve_transient(sys, opt, [jm](const Eigen::VectorXd& x) { return x(jm); });
}

/// Max |i_h(t) - i(t)| / (V/R) over three time constants, i(t) the exact RL
/// step response with the closed-form inductance.
inline double rl_transient_error(int cells, int steps_per_tau = 400) {
  SquareCoreConfig cfg;
  cfg.cells = cells;
  const double l = square_core_inductance(cfg);
  const double tau = l / cfg.resistance;
  const double dt = tau / steps_per_tau;
  const auto res = rl_run(cfg, 3 * steps_per_tau * dt, dt);
  const double i_inf = cfg.source.amplitude / cfg.resistance;
  double worst = 0.0;
  for (std::size_t n = 0; n < res.times.size(); ++n) {
    const double exact = i_inf * (1.0 - std::exp(-res.times[n] / tau));
    worst = std::max(worst, std::abs(res.qoi[n] - exact) / i_inf);
  }
  return worst;
}

/// Errors of steps h, h/2, h/4 against an h/32 reference on the coarse grid,
/// and the two successive ratios.
struct SelfConvergence {
  std::array<double, 3> errors{};
  std::array<double, 2> ratios{};
};

inline SelfConvergence rl_self_convergence(int cells = 8) {
  SquareCoreConfig cfg;
  cfg.cells = cells;
  const double tau = square_core_inductance(cfg) / cfg.resistance;
  const double h = tau / 32.0;
  const double t_end = 64 * h;
  const auto ref = rl_run(cfg, t_end, h / 32.0);
  SelfConvergence out;
  for (int level = 0; level < 3; ++level) {
    const int factor = 1 << level;
    const auto run = rl_run(cfg, t_end, h / factor);
    double worst = 0.0;
    for (std::size_t n = 0; n < run.times.size(); n += static_cast<std::size_t>(factor)) {
      worst = std::max(worst, std::abs(run.qoi[n] - ref.qoi[n * 32 / static_cast<std::size_t>(factor)]));
    }
    out.errors[static_cast<std::size_t>(level)] = worst;
  }
  out.ratios = {out.errors[0] / out.errors[1], out.errors[1] / out.errors[2]};
  return out;
}

/// Central finite-difference Jacobian of the coupled residual, one column per
/// state entry, step scaled to the entry's block.
inline Eigen::MatrixXd fd_coupled_jacobian(const CoupledSystem& sys, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& x_prev, double dt, double t) {
  const StateLayout& l = sys.layout();
  const int bounds[] = {l.u0(), l.jl0(), l.jv0(), l.jm0(), l.a0(), l.size()};
  Eigen::MatrixXd j(l.size(), l.size());
  for (int b = 0; b < 5; ++b) {
    const int n = bounds[b + 1] - bounds[b];
    if (n == 0) continue;
    const double block_max = x.segment(bounds[b], n).cwiseAbs().maxCoeff();
    for (int c = bounds[b]; c < bounds[b + 1]; ++c) {
      const double step = 1e-6 * std::max({std::abs(x(c)), 1e-3 * block_max, 1e-12});
      Eigen::VectorXd xp = x, xm = x;
      xp(c) += step;
      xm(c) -= step;
      j.col(c) = (coupled_residual(sys, xp, x_prev, dt, t) - coupled_residual(sys, xm, x_prev, dt, t)) / (2.0 * step);
    }
  }
  return j;
}

/// max over columns of max_i |J - J_fd| / max_i |J| at a given state.
inline double jacobian_mismatch(const CoupledSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& x_prev,
                                double dt, double t) {
  const Eigen::MatrixXd analytic = Eigen::MatrixXd(coupled_jacobian(sys, x, x_prev, dt, t));
  const Eigen::MatrixXd fd = fd_coupled_jacobian(sys, x, x_prev, dt, t);
  double worst = 0.0;
  for (Eigen::Index c = 0; c < analytic.cols(); ++c) {
    const double scale = std::max(analytic.col(c).cwiseAbs().maxCoeff(), fd.col(c).cwiseAbs().maxCoeff());
    if (scale == 0.0) continue;
    worst = std::max(worst, (analytic.col(c) - fd.col(c)).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

/// Coarse rectifier used for the Jacobian check, and two consecutive states
/// from its transient at a time where the core is driven into saturation.
struct RectifierFixture {
  RectifierConfig cfg;
  Eigen::VectorXd mean;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> times;
};

inline RectifierFixture rectifier_fixture(double t_end = 0.012) {
  RectifierFixture f;
  f.cfg.mesh_refinement = 1;
  f.cfg.dt = 2e-4;
  f.cfg.t_end = t_end;
  const RectifierModel model(f.cfg);
  f.mean = model.mean_point();
  const auto res = model.run(f.mean, true);
  f.states = res.states;
  f.times = res.times;
  return f;
}

inline double rectifier_jacobian_mismatch(const RectifierFixture& f, std::size_t step) {
  const RectifierModel model(f.cfg);
  const CoupledSystem sys = model.system(f.mean);
  return jacobian_mismatch(sys, f.states.at(step), f.states.at(step - 1), f.cfg.dt, f.times.at(step));
}

}  // namespace checks
