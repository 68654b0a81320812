#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcuq/errors.hpp"

namespace gpcuq::fc {

inline constexpr int kGround = -1;

/// Two-terminal branch; current flows from `pos` through the element to `neg`.
/// Either terminal may be ground.
struct Branch {
  int pos = kGround;
  int neg = kGround;
};

struct Waveform {
  enum class Kind { sine, step, zero };
  Kind kind = Kind::zero;
  double amplitude = 0.0;
  double period = 1.0;

  double operator()(double t) const {
    switch (kind) {
      case Kind::sine: return amplitude * std::sin(2.0 * std::numbers::pi * t / period);
      case Kind::step: return t > 0.0 ? amplitude : 0.0;
      case Kind::zero: break;
    }
    return 0.0;
  }

  static Waveform sine(double amplitude, double period) { return {Kind::sine, amplitude, period}; }
  static Waveform step(double amplitude) { return {Kind::step, amplitude, 1.0}; }
};

struct Resistor { Branch branch; double resistance; };
struct Capacitor { Branch branch; double capacitance; };
struct Inductor { Branch branch; double inductance; };
struct VoltageSource { Branch branch; Waveform waveform; };
struct CurrentSource { Branch branch; Waveform waveform; };

/// Lumped circuit in modified-nodal form. Windings are the branches whose
/// voltage is the time derivative of a field flux linkage; diodes follow the
/// Shockley law with `pos` as anode.
struct CircuitNetlist {
  int num_nodes = 0;  // excluding ground
  std::vector<Resistor> resistors;
  std::vector<Capacitor> capacitors;
  std::vector<Inductor> inductors;
  std::vector<VoltageSource> voltage_sources;
  std::vector<CurrentSource> current_sources;
  std::vector<Branch> windings;
  std::vector<Branch> diodes;

  void validate() const {
    auto check = [&](const Branch& b, const char* what) {
      for (int n : {b.pos, b.neg}) {
        if (n < kGround || n >= num_nodes) throw ConfigError(std::string("netlist: ") + what + " node out of range");
      }
      if (b.pos == b.neg) throw ConfigError(std::string("netlist: ") + what + " shorted to itself");
    };
    for (const auto& r : resistors) {
      check(r.branch, "resistor");
      if (!(r.resistance > 0.0)) throw ConfigError("netlist: resistance must be positive");
    }
    for (const auto& c : capacitors) {
      check(c.branch, "capacitor");
      if (!(c.capacitance > 0.0)) throw ConfigError("netlist: capacitance must be positive");
    }
    for (const auto& l : inductors) {
      check(l.branch, "inductor");
      if (!(l.inductance > 0.0)) throw ConfigError("netlist: inductance must be positive");
    }
    for (const auto& v : voltage_sources) check(v.branch, "voltage source");
    for (const auto& i : current_sources) check(i.branch, "current source");
    for (const auto& w : windings) check(w, "winding");
    for (const auto& d : diodes) check(d, "diode");
  }

  /// Node x branch incidence matrix with +1 at `pos` and -1 at `neg`
  /// (ground rows omitted).
  static Eigen::MatrixXd incidence(int num_nodes, const std::vector<Branch>& branches) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(num_nodes, static_cast<Eigen::Index>(branches.size()));
    for (std::size_t j = 0; j < branches.size(); ++j) {
      if (branches[j].pos != kGround) a(branches[j].pos, static_cast<Eigen::Index>(j)) += 1.0;
      if (branches[j].neg != kGround) a(branches[j].neg, static_cast<Eigen::Index>(j)) -= 1.0;
    }
    return a;
  }

  template <class Element>
  static std::vector<Branch> branches_of(const std::vector<Element>& elements) {
    std::vector<Branch> out;
    for (const auto& e : elements) out.push_back(e.branch);
    return out;
  }

  Eigen::MatrixXd incidence_r() const { return incidence(num_nodes, branches_of(resistors)); }
  Eigen::MatrixXd incidence_c() const { return incidence(num_nodes, branches_of(capacitors)); }
  Eigen::MatrixXd incidence_l() const { return incidence(num_nodes, branches_of(inductors)); }
  Eigen::MatrixXd incidence_v() const { return incidence(num_nodes, branches_of(voltage_sources)); }
  Eigen::MatrixXd incidence_i() const { return incidence(num_nodes, branches_of(current_sources)); }
  Eigen::MatrixXd incidence_m() const { return incidence(num_nodes, windings); }
  Eigen::MatrixXd incidence_d() const { return incidence(num_nodes, diodes); }
};

}  // namespace gpcuq::fc
