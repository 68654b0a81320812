#pragma once

// Bridge rectifier fed through a transformer whose magnetics are resolved by
// the planar FEM model. This is the benchmark ParametricModel.
//
// Circuit (node numbers, ground = -1):
//
//   0 --R_p-- 1 --[primary winding]-- gnd         v(t) between 0 and gnd
//   2 --[secondary winding]-- 3
//   2 --R_s-- 4                                   bridge inputs: 4 and 3
//   D1: 4 -> 5   D2: 3 -> 5   D3: gnd -> 4   D4: gnd -> 3
//   5 --(C_load || R_load)-- gnd                  QoI = u_5
//   3 --R_bleed-- gnd                             ties the floating secondary
//
// Transformer cross-section (base unit `cell`, domain 16 x 12 cells):
// a closed rectangular core [3,13] x [2,10] with window [5,11] x [4,8];
// primary coil sides at [5,7] (go) and [1,3] (return), secondary coil sides
// at [9,11] (go) and [13,15] (return), all spanning y in [4,8].
//
// Uncertain parameters, in order:
//   I_S,1..4  U_TH,1..4  k1 k2 k3

#include <array>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcuq/collocation.hpp"
#include "gpcuq/errors.hpp"
#include "gpcuq/field_circuit/coupled.hpp"
#include "gpcuq/field_circuit/magnetostatics.hpp"
#include "gpcuq/field_circuit/mesh.hpp"
#include "gpcuq/field_circuit/netlist.hpp"
#include "gpcuq/field_circuit/transient.hpp"

namespace gpcuq::fc {

inline constexpr int kRectifierParameters = 11;

struct RectifierConfig {
  double source_amplitude = 10.0;  // V
  double period = 0.02;            // s
  double primary_resistance = 0.5;
  double secondary_resistance = 0.5;
  double load_resistance = 100.0;
  double load_capacitance = 100e-6;
  double bleed_resistance = 1e5;
  double primary_turns = 600.0;
  double secondary_turns = 600.0;
  double depth = 0.02;  // m
  double cell = 0.002;  // m
  int mesh_refinement = 3;
  double t_end = 0.04;
  double dt = 1e-4;
  NewtonOptions newton;

  /// Mean values of the eleven uncertain parameters.
  std::array<double, kRectifierParameters> means = {1e-6,    1e-6,    1e-6,    1e-6,   0.02585,
                                                    0.02585, 0.02585, 0.02585, 0.3774, 2.97,
                                                    388.33};

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "rectifier amplitude=" << source_amplitude << " period=" << period << " rp=" << primary_resistance
       << " rs=" << secondary_resistance << " rl=" << load_resistance << " cl=" << load_capacitance
       << " rb=" << bleed_resistance << " n1=" << primary_turns << " n2=" << secondary_turns << " depth=" << depth
       << " cell=" << cell << " refine=" << mesh_refinement << " t_end=" << t_end << " dt=" << dt
       << " tol=" << newton.tolerance << " maxit=" << newton.max_iterations;
    return os.str();
  }
};

enum RectifierTag : int { kAir = 0, kIron = 1, kPrimaryGo = 2, kPrimaryReturn = 3, kSecondaryGo = 4, kSecondaryReturn = 5 };

inline std::shared_ptr<const FemGeometry> rectifier_geometry(const RectifierConfig& cfg) {
  if (cfg.mesh_refinement < 1) throw ConfigError("rectifier: mesh_refinement must be >= 1");
  const double u = cfg.cell;
  const std::vector<RectRegion> regions = {
      {3 * u, 13 * u, 2 * u, 10 * u, kIron},      {5 * u, 11 * u, 4 * u, 8 * u, kAir},
      {5 * u, 7 * u, 4 * u, 8 * u, kPrimaryGo},   {1 * u, 3 * u, 4 * u, 8 * u, kPrimaryReturn},
      {9 * u, 11 * u, 4 * u, 8 * u, kSecondaryGo}, {13 * u, 15 * u, 4 * u, 8 * u, kSecondaryReturn},
  };
  const int r = cfg.mesh_refinement;
  TriMesh mesh = structured_rectangle(16 * u, 12 * u, 16 * r, 12 * r, regions, kAir);
  const std::vector<RegionSpec> specs = {
      {kIron, Material::iron},
      {kPrimaryGo, Material::air, 0, cfg.primary_turns, 1.0},
      {kPrimaryReturn, Material::air, 0, cfg.primary_turns, -1.0},
      {kSecondaryGo, Material::air, 1, cfg.secondary_turns, 1.0},
      {kSecondaryReturn, Material::air, 1, cfg.secondary_turns, -1.0},
  };
  return std::make_shared<const FemGeometry>(std::move(mesh), specs, 2, cfg.depth);
}

inline CircuitNetlist rectifier_netlist(const RectifierConfig& cfg) {
  CircuitNetlist n;
  n.num_nodes = 6;
  n.voltage_sources.push_back({{0, kGround}, Waveform::sine(cfg.source_amplitude, cfg.period)});
  n.resistors.push_back({{0, 1}, cfg.primary_resistance});
  n.windings.push_back({1, kGround});
  n.windings.push_back({2, 3});
  n.resistors.push_back({{2, 4}, cfg.secondary_resistance});
  n.diodes = {{4, 5}, {3, 5}, {kGround, 4}, {kGround, 3}};
  n.capacitors.push_back({{5, kGround}, cfg.load_capacitance});
  n.resistors.push_back({{5, kGround}, cfg.load_resistance});
  n.resistors.push_back({{3, kGround}, cfg.bleed_resistance});
  return n;
}

inline constexpr int kRectifierOutputNode = 5;

class RectifierModel : public ParametricModel {
 public:
  explicit RectifierModel(RectifierConfig cfg)
      : cfg_(std::move(cfg)), geometry_(rectifier_geometry(cfg_)), netlist_(rectifier_netlist(cfg_)) {
    netlist_.validate();
    const long steps = std::lround(cfg_.t_end / cfg_.dt);
    for (long s = 0; s <= steps; ++s) times_.push_back(s * cfg_.dt);
  }

  const RectifierConfig& config() const { return cfg_; }
  const std::shared_ptr<const FemGeometry>& geometry() const { return geometry_; }
  const std::vector<double>& times() const override { return times_; }
  std::string description() const override { return cfg_.describe(); }

  CoupledSystem system(const Eigen::VectorXd& p) const {
    if (p.size() != kRectifierParameters) throw ShapeError("rectifier: expected 11 parameters");
    std::vector<DiodeParams> diodes(4);
    for (int k = 0; k < 4; ++k) diodes[static_cast<std::size_t>(k)] = {p(k), p(4 + k)};
    FemField field{geometry_, BrauerParams{p(8), p(9), p(10)}};
    return CoupledSystem(netlist_, std::move(field), std::move(diodes));
  }

  TransientResult run(const Eigen::VectorXd& p, bool keep_states = false) const {
    const CoupledSystem sys = system(p);
    TransientOptions opt;
    opt.t_end = cfg_.t_end;
    opt.dt = cfg_.dt;
    opt.newton = cfg_.newton;
    opt.keep_states = keep_states;
    const int out = sys.layout().u0() + kRectifierOutputNode;
    return solve_transient(sys, opt, [out](const Eigen::VectorXd& x) { return x(out); });
  }

  std::vector<double> evaluate(const Eigen::VectorXd& p) const override { return run(p).qoi; }

  Eigen::VectorXd mean_point() const {
    Eigen::VectorXd p(kRectifierParameters);
    for (int j = 0; j < kRectifierParameters; ++j) p(j) = cfg_.means[static_cast<std::size_t>(j)];
    return p;
  }

 private:
  RectifierConfig cfg_;
  std::shared_ptr<const FemGeometry> geometry_;
  CircuitNetlist netlist_;
  std::vector<double> times_;
};

/// Series RL circuit whose inductor is a single coil filling a square of
/// linear magnetic material with A = 0 on its boundary:
///   v(t) between node 0 and ground, R from 0 to 1, winding from 1 to ground.
struct SquareCoreConfig {
  double side = 0.1;        // m
  int cells = 16;           // per side
  double depth = 1.0;       // m
  double turns = 1.0;
  double reluctivity = 388.7074;  // m/H, linear
  double resistance = 0.01;       // ohm
  Waveform source = Waveform::step(1.0);
};

inline CoupledSystem square_core_rl_system(const SquareCoreConfig& cfg) {
  TriMesh mesh = structured_rectangle(cfg.side, cfg.side, cfg.cells, cfg.cells, {}, 1);
  const std::vector<RegionSpec> specs = {{1, Material::iron, 0, cfg.turns, 1.0}};
  auto geometry = std::make_shared<const FemGeometry>(std::move(mesh), specs, 1, cfg.depth);
  FemField field{geometry, BrauerParams{0.0, 0.0, cfg.reluctivity}};
  field.linear_iron = true;
  CircuitNetlist n;
  n.num_nodes = 2;
  n.voltage_sources.push_back({{0, kGround}, cfg.source});
  n.resistors.push_back({{0, 1}, cfg.resistance});
  n.windings.push_back({1, kGround});
  return CoupledSystem(std::move(n), std::move(field), {});
}

}  // namespace gpcuq::fc
