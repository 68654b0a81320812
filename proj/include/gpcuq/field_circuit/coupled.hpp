#pragma once

// Monolithic implicit-Euler residual of the field-circuit DAE.
//
// State layout (fixed): [u | j_L | j_V | j_M | A]
//   u    node voltages (non-ground nodes)
//   j_L  inductor currents
//   j_V  voltage-source currents
//   j_M  winding currents
//   A    interior vector-potential dofs
//
// Rows, for one step t_prev -> t = t_prev + dt:
//   KCL    A_C C (u - u_prev)/dt + A_R G A_R^T u + A_L j_L + A_V j_V + A_M j_M
//          + A_D j_D(A_D^T u) + A_I i(t)
//   L      L (j_L - j_L,prev)/dt - A_L^T u
//   V      A_V^T u - v(t)
//   M      X^T (A - A_prev)/dt - A_M^T u
//   field  K(A) A - X j_M

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gpcuq/errors.hpp"
#include "gpcuq/field_circuit/devices.hpp"
#include "gpcuq/field_circuit/magnetostatics.hpp"
#include "gpcuq/field_circuit/netlist.hpp"

namespace gpcuq::fc {

struct StateLayout {
  int nodes = 0, inductors = 0, vsources = 0, windings = 0, fem = 0;

  int u0() const { return 0; }
  int jl0() const { return nodes; }
  int jv0() const { return jl0() + inductors; }
  int jm0() const { return jv0() + vsources; }
  int a0() const { return jm0() + windings; }
  int size() const { return a0() + fem; }

  /// Human-readable block name for a flat row or column index.
  std::string block_of(int i) const {
    if (i < jl0()) return "KCL node " + std::to_string(i - u0());
    if (i < jv0()) return "inductor " + std::to_string(i - jl0());
    if (i < jm0()) return "voltage source " + std::to_string(i - jv0());
    if (i < a0()) return "winding " + std::to_string(i - jm0());
    return "field dof " + std::to_string(i - a0());
  }
};

class CoupledSystem {
 public:
  CoupledSystem(CircuitNetlist netlist, FemField field, std::vector<DiodeParams> diodes)
      : netlist_(std::move(netlist)), field_(std::move(field)), diodes_(std::move(diodes)) {
    netlist_.validate();
    if (diodes_.size() != netlist_.diodes.size()) throw ConfigError("coupled system: one DiodeParams per diode required");
    for (const auto& d : diodes_) {
      if (!(d.saturation_current > 0.0 && d.thermal_voltage > 0.0)) {
        throw ConfigError("coupled system: diode parameters must be positive");
      }
    }
    if (!field_.geometry) throw ConfigError("coupled system: missing field geometry");
    if (field_.geometry->num_windings() != static_cast<int>(netlist_.windings.size())) {
      throw ConfigError("coupled system: winding count differs between netlist and field");
    }
    const auto& b = field_.brauer;
    if (!(b.k1 >= 0.0 && b.k2 >= 0.0 && b.k3 >= 0.0 && b.k1 + b.k3 > 0.0)) {
      throw ConfigError("coupled system: Brauer parameters must satisfy k1,k2,k3 >= 0 and k1 + k3 > 0");
    }
    layout_.nodes = netlist_.num_nodes;
    layout_.inductors = static_cast<int>(netlist_.inductors.size());
    layout_.vsources = static_cast<int>(netlist_.voltage_sources.size());
    layout_.windings = static_cast<int>(netlist_.windings.size());
    layout_.fem = field_.geometry->num_dofs();
  }

  const StateLayout& layout() const { return layout_; }
  const CircuitNetlist& netlist() const { return netlist_; }
  const FemField& field() const { return field_; }
  const std::vector<DiodeParams>& diodes() const { return diodes_; }

  /// Largest fraction of the Newton update -dx that keeps every forward-biased
  /// junction voltage within the logarithmic limit of the classic SPICE
  /// junction limiter; 1 when no diode needs limiting.
  double junction_step_limit(const Eigen::VectorXd& x, const Eigen::VectorXd& dx) const {
    double alpha = 1.0;
    auto volt = [&](const Eigen::VectorXd& v, int node) { return node == kGround ? 0.0 : v(layout_.u0() + node); };
    for (std::size_t k = 0; k < netlist_.diodes.size(); ++k) {
      const Branch& b = netlist_.diodes[k];
      const double vt = diodes_[k].thermal_voltage;
      const double vcrit = vt * std::log(vt / (std::sqrt(2.0) * diodes_[k].saturation_current));
      const double v_old = volt(x, b.pos) - volt(x, b.neg);
      const double dv = -(volt(dx, b.pos) - volt(dx, b.neg));
      const double v_new = v_old + dv;
      if (!(v_new > vcrit && std::abs(dv) > 2.0 * vt)) continue;
      double v_lim;
      if (v_old > 0.0) {
        const double arg = 1.0 + dv / vt;
        v_lim = arg > 0.0 ? v_old + vt * std::log(arg) : vcrit;
      } else {
        v_lim = vt * std::log(v_new / vt);
      }
      const double frac = (v_lim - v_old) / dv;
      if (frac > 0.0 && frac < alpha) alpha = frac;
    }
    return alpha;
  }

  /// Residual, per-row magnitude of the summed terms (for relative
  /// convergence tests) and optionally the Jacobian d residual / d x.
  void evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prev, double dt, double t,
                Eigen::VectorXd& residual, Eigen::VectorXd& magnitude, Eigen::SparseMatrix<double>* jacobian) const {
    const StateLayout& L = layout_;
    if (x.size() != L.size() || x_prev.size() != L.size()) throw ShapeError("coupled_residual: state size mismatch");
    if (!(dt > 0.0)) throw DomainError("coupled_residual: dt must be positive");
    residual.setZero(L.size());
    magnitude.setZero(L.size());
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<Eigen::Triplet<double>>* tp = jacobian ? &trip : nullptr;
    if (tp) tp->reserve(static_cast<std::size_t>(L.size()) * 12);

    auto volt = [&](const Eigen::VectorXd& v, int node) { return node == kGround ? 0.0 : v(L.u0() + node); };
    auto branch_v = [&](const Eigen::VectorXd& v, const Branch& b) { return volt(v, b.pos) - volt(v, b.neg); };
    auto add = [&](int row, double value) {
      residual(row) += value;
      magnitude(row) += std::abs(value);
    };
    auto jac = [&](int row, int col, double value) {
      if (tp) tp->emplace_back(row, col, value);
    };
    // current `i` leaving the circuit at pos and re-entering at neg
    auto stamp_current = [&](const Branch& b, double i) {
      if (b.pos != kGround) add(L.u0() + b.pos, i);
      if (b.neg != kGround) add(L.u0() + b.neg, -i);
    };
    // conductance-like dependence of a branch current on its own voltage
    auto stamp_conductance = [&](const Branch& b, double g) {
      const int p = b.pos == kGround ? -1 : L.u0() + b.pos;
      const int n = b.neg == kGround ? -1 : L.u0() + b.neg;
      if (p >= 0) jac(p, p, g);
      if (n >= 0) jac(n, n, g);
      if (p >= 0 && n >= 0) {
        jac(p, n, -g);
        jac(n, p, -g);
      }
    };
    // KCL coupling of a branch-current unknown `col`, plus the term
    // sign * A^T u in that branch's own row
    auto stamp_branch_unknown = [&](const Branch& b, int col, double sign) {
      stamp_current(b, x(col));
      if (b.pos != kGround) {
        jac(L.u0() + b.pos, col, 1.0);
        jac(col, L.u0() + b.pos, sign);
      }
      if (b.neg != kGround) {
        jac(L.u0() + b.neg, col, -1.0);
        jac(col, L.u0() + b.neg, -sign);
      }
      add(col, sign * branch_v(x, b));
    };

    for (const auto& r : netlist_.resistors) {
      stamp_current(r.branch, branch_v(x, r.branch) / r.resistance);
      stamp_conductance(r.branch, 1.0 / r.resistance);
    }
    for (const auto& c : netlist_.capacitors) {
      // history term stamped separately so the magnitude reflects cancellation
      stamp_current(c.branch, c.capacitance * branch_v(x, c.branch) / dt);
      stamp_current(c.branch, -c.capacitance * branch_v(x_prev, c.branch) / dt);
      stamp_conductance(c.branch, c.capacitance / dt);
    }
    for (std::size_t k = 0; k < netlist_.diodes.size(); ++k) {
      const DiodeEval d = shockley(branch_v(x, netlist_.diodes[k]), diodes_[k]);
      stamp_current(netlist_.diodes[k], d.current);
      stamp_conductance(netlist_.diodes[k], d.conductance);
    }
    for (const auto& s : netlist_.current_sources) stamp_current(s.branch, s.waveform(t));

    for (int k = 0; k < L.inductors; ++k) {
      const auto& ind = netlist_.inductors[static_cast<std::size_t>(k)];
      const int row = L.jl0() + k;
      stamp_branch_unknown(ind.branch, row, -1.0);
      add(row, ind.inductance * x(row) / dt);
      add(row, -ind.inductance * x_prev(row) / dt);
      jac(row, row, ind.inductance / dt);
    }
    for (int k = 0; k < L.vsources; ++k) {
      const auto& src = netlist_.voltage_sources[static_cast<std::size_t>(k)];
      const int row = L.jv0() + k;
      stamp_branch_unknown(src.branch, row, 1.0);
      add(row, -src.waveform(t));
    }
    const Eigen::MatrixXd& xw = field_.geometry->coupling();
    for (int w = 0; w < L.windings; ++w) {
      const int row = L.jm0() + w;
      stamp_branch_unknown(netlist_.windings[static_cast<std::size_t>(w)], row, -1.0);
      const auto col = xw.col(w);
      const double flux = col.dot(x.segment(L.a0(), L.fem));
      const double flux_prev = col.dot(x_prev.segment(L.a0(), L.fem));
      add(row, flux / dt);
      add(row, -flux_prev / dt);
      for (int i = 0; i < L.fem; ++i) {
        if (col(i) != 0.0) jac(row, L.a0() + i, col(i) / dt);
      }
    }
    detail::assemble_field(field_, x.segment(L.a0(), L.fem), x.segment(L.jm0(), L.windings), residual, magnitude, tp,
                           L.a0(), L.a0(), L.jm0());

    for (int i = 0; i < L.size(); ++i) {
      if (!std::isfinite(residual(i))) {
        throw ConvergenceError("coupled_residual: non-finite residual in row " + std::to_string(i) + " (" +
                               L.block_of(i) + ")");
      }
    }
    if (jacobian) {
      jacobian->resize(L.size(), L.size());
      jacobian->setFromTriplets(trip.begin(), trip.end());
    }
  }

 private:
  CircuitNetlist netlist_;
  FemField field_;
  std::vector<DiodeParams> diodes_;
  StateLayout layout_;
};

inline Eigen::VectorXd coupled_residual(const CoupledSystem& sys, const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& x_prev, double dt, double t) {
  Eigen::VectorXd r, mag;
  sys.evaluate(x, x_prev, dt, t, r, mag, nullptr);
  return r;
}

inline Eigen::SparseMatrix<double> coupled_jacobian(const CoupledSystem& sys, const Eigen::VectorXd& x,
                                                    const Eigen::VectorXd& x_prev, double dt, double t) {
  Eigen::VectorXd r, mag;
  Eigen::SparseMatrix<double> j;
  sys.evaluate(x, x_prev, dt, t, r, mag, &j);
  return j;
}

}  // namespace gpcuq::fc
