#pragma once

// Run configuration: INI-style "key = value" lines grouped in [sections],
// whole-line comments starting with '#' or ';'. Every key is optional; unknown
// keys are rejected. Overrides of the form "section.key=value" are applied
// after the file.
//
//   [model]       name = field-circuit | synthetic:<constant|linear|smooth|basis:a1,...,aq>
//   [space]       means = v1, v2, ...   halfwidth = 0.2
//   [chaos]       degree = 3
//   [quadrature]  rule = stroud5 | tensor:<n>
//   [time]        t_end, dt
//   [circuit]     amplitude, period, r_primary, r_secondary, r_load, c_load, r_bleed
//   [transformer] n_primary, n_secondary, depth, cell, refine
//   [solver]      tolerance, max_iterations, max_halvings
//   [sparsify]    tolerances = e1, e2, ...
//   [pod]         ranks = r1, r2, ... | a-b     basis_rank = r
//   [run]         output = <dir>   workers = n

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gpcuq/chaos_basis.hpp"
#include "gpcuq/errors.hpp"
#include "gpcuq/field_circuit/rectifier.hpp"
#include "gpcuq/io/text.hpp"

namespace gpcuq::io {

struct RunConfig {
  std::string model = "field-circuit";
  std::vector<double> means;  ///< empty: the model's defaults
  double halfwidth = 0.2;
  int degree = 3;
  std::string rule = "stroud5";
  double t_end = 0.04;
  double dt = 1e-4;
  fc::RectifierConfig circuit;  ///< time grid fields are overwritten from t_end and dt
  std::vector<double> tolerances = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<int> ranks = [] {
    std::vector<int> r;
    for (int i = 1; i <= 30; ++i) r.push_back(i);
    return r;
  }();
  int basis_rank = 20;
  std::filesystem::path output = "out";
  unsigned workers = 1;

  bool is_field_circuit() const { return model == "field-circuit"; }
  std::string synthetic_name() const { return model.substr(model.find(':') + 1); }

  std::vector<double> resolved_means() const {
    if (!means.empty() || !is_field_circuit()) return means;
    return {circuit.means.begin(), circuit.means.end()};
  }

  /// Everything that influences result files, one "key=value" per line. The
  /// output directory and the worker count are deliberately left out.
  std::string canonical() const {
    std::ostringstream os;
    auto list = [](const auto& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(v[i])>>) {
          s += format_double(v[i]);
        } else {
          s += std::to_string(v[i]);
        }
      }
      return s;
    };
    os << "model=" << model << '\n'
       << "means=" << list(resolved_means()) << '\n'
       << "halfwidth=" << format_double(halfwidth) << '\n'
       << "degree=" << degree << '\n'
       << "rule=" << rule << '\n'
       << "t_end=" << format_double(t_end) << '\n'
       << "dt=" << format_double(dt) << '\n'
       << "tolerances=" << list(tolerances) << '\n'
       << "ranks=" << list(ranks) << '\n'
       << "basis_rank=" << basis_rank << '\n';
    if (is_field_circuit()) {
      const auto& c = circuit;
      os << "circuit=" << list(std::vector<double>{c.source_amplitude, c.period, c.primary_resistance,
                                                   c.secondary_resistance, c.load_resistance, c.load_capacitance,
                                                   c.bleed_resistance})
         << '\n'
         << "transformer=" << list(std::vector<double>{c.primary_turns, c.secondary_turns, c.depth, c.cell})
         << ",refine=" << c.mesh_refinement << '\n'
         << "solver=" << format_double(c.newton.tolerance) << ',' << c.newton.max_iterations << ','
         << c.newton.max_halvings << '\n';
    }
    return os.str();
  }

  std::string hash() const { return sha256_hex(canonical()); }

  int dim() const { return static_cast<int>(resolved_means().size()); }
  std::size_t basis_size() const { return total_degree_count(dim(), degree); }
  std::size_t time_points() const { return static_cast<std::size_t>(std::lround(t_end / dt)) + 1; }

  void validate() const {
    if (!is_field_circuit() && model.rfind("synthetic:", 0) != 0) {
      throw ConfigError("model.name must be 'field-circuit' or 'synthetic:<name>', got '" + model + "'");
    }
    if (is_field_circuit() && !means.empty() && means.size() != fc::kRectifierParameters) {
      throw ConfigError("space.means: the field-circuit model has 11 parameters, got " + std::to_string(means.size()));
    }
    if (!is_field_circuit() && means.empty()) throw ConfigError("space.means is required for synthetic models");
    if (!(halfwidth > 0.0 && halfwidth < 1.0)) throw ConfigError("space.halfwidth must lie in (0, 1)");
    for (double m : resolved_means()) {
      if (m == 0.0 || !std::isfinite(m)) throw ConfigError("space.means must be finite and nonzero");
    }
    if (degree < 0) throw ConfigError("chaos.degree must be >= 0");
    if (rule != "stroud5") {
      int n = 0;
      if (rule.rfind("tensor:", 0) != 0 || !parse_int(rule.substr(7), n) || n < 1) {
        throw ConfigError("quadrature.rule must be 'stroud5' or 'tensor:<n>' with n >= 1, got '" + rule + "'");
      }
    }
    if (!(dt > 0.0) || !(t_end > 0.0)) throw ConfigError("time.t_end and time.dt must be positive");
    const long steps = std::lround(t_end / dt);
    if (steps < 1 || std::abs(steps * dt - t_end) > 1e-9 * t_end) {
      throw ConfigError("time.t_end must be an integer multiple of time.dt");
    }
    if (tolerances.empty()) throw ConfigError("sparsify.tolerances must not be empty");
    for (double e : tolerances) {
      if (!(e > 0.0 && e < 1.0)) throw ConfigError("sparsify.tolerances must lie in (0, 1), got " + format_double(e));
    }
    const std::size_t limit = std::min(basis_size(), time_points());
    if (ranks.empty()) throw ConfigError("pod.ranks must not be empty");
    for (int r : ranks) {
      if (r < 1 || static_cast<std::size_t>(r) > limit) {
        throw ConfigError("pod.ranks: " + std::to_string(r) + " outside [1, " + std::to_string(limit) + "]");
      }
    }
    if (basis_rank < 1 || static_cast<std::size_t>(basis_rank) > limit) {
      throw ConfigError("pod.basis_rank outside [1, " + std::to_string(limit) + "]");
    }
    if (workers < 1) throw ConfigError("run.workers must be >= 1");
    if (output.empty()) throw ConfigError("run.output must not be empty");
  }

  static bool parse_int(const std::string& s, int& out) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
  }
};

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  double d = 0.0;
  if (!parse_double(trim(v), d) || !std::isfinite(d)) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return d;
}

inline int to_int(const std::string& key, const std::string& v) {
  int i = 0;
  if (!RunConfig::parse_int(trim(v), i)) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return i;
}

inline std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& tok : split(v, ',')) out.push_back(to_double(key, tok));
  return out;
}

/// "1, 2, 5" or "1-30" or a mix such as "1-10, 15, 20".
inline std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& tok : split(v, ',')) {
    const auto dash = tok.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(to_int(key, tok));
      continue;
    }
    const int a = to_int(key, tok.substr(0, dash)), b = to_int(key, tok.substr(dash + 1));
    if (b < a) throw ConfigError(key + ": empty range '" + tok + "'");
    for (int r = a; r <= b; ++r) out.push_back(r);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const std::string& key, double fc::RectifierConfig::*field) {
      t[key] = [field](RunConfig& c, const std::string& k, const std::string& v) { c.circuit.*field = to_double(k, v); };
    };
    t["model.name"] = [](RunConfig& c, const std::string&, const std::string& v) { c.model = trim(v); };
    t["space.means"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.means = to_doubles(k, v); };
    t["space.halfwidth"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.halfwidth = to_double(k, v); };
    t["chaos.degree"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.degree = to_int(k, v); };
    t["quadrature.rule"] = [](RunConfig& c, const std::string&, const std::string& v) { c.rule = trim(v); };
    t["time.t_end"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.t_end = to_double(k, v); };
    t["time.dt"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.dt = to_double(k, v); };
    num("circuit.amplitude", &fc::RectifierConfig::source_amplitude);
    num("circuit.period", &fc::RectifierConfig::period);
    num("circuit.r_primary", &fc::RectifierConfig::primary_resistance);
    num("circuit.r_secondary", &fc::RectifierConfig::secondary_resistance);
    num("circuit.r_load", &fc::RectifierConfig::load_resistance);
    num("circuit.c_load", &fc::RectifierConfig::load_capacitance);
    num("circuit.r_bleed", &fc::RectifierConfig::bleed_resistance);
    num("transformer.n_primary", &fc::RectifierConfig::primary_turns);
    num("transformer.n_secondary", &fc::RectifierConfig::secondary_turns);
    num("transformer.depth", &fc::RectifierConfig::depth);
    num("transformer.cell", &fc::RectifierConfig::cell);
    t["transformer.refine"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.circuit.mesh_refinement = to_int(k, v);
    };
    t["solver.tolerance"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.circuit.newton.tolerance = to_double(k, v);
    };
    t["solver.max_iterations"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.circuit.newton.max_iterations = to_int(k, v);
    };
    t["solver.max_halvings"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.circuit.newton.max_halvings = to_int(k, v);
    };
    t["sparsify.tolerances"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.tolerances = to_doubles(k, v);
    };
    t["pod.ranks"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.ranks = to_int_list(k, v); };
    t["pod.basis_rank"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.basis_rank = to_int(k, v); };
    t["run.output"] = [](RunConfig& c, const std::string&, const std::string& v) { c.output = trim(v); };
    t["run.workers"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      const int w = to_int(k, v);
      if (w < 1) throw ConfigError(k + " must be >= 1");
      c.workers = static_cast<unsigned>(w);
    };
    return t;
  }();
  return table;
}

}  // namespace detail

inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto& table = detail::setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second(cfg, key, value);
}

/// "section.key=value"
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form section.key=value");
  apply_setting(cfg, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

inline void apply_ini(RunConfig& cfg, std::istream& in, const std::string& source) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(source + ": key '" + section + "' outside a [section]");
    for (const auto& [key, value] : body) apply_setting(cfg, section + "." + key, value.data());
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  RunConfig cfg;
  apply_ini(cfg, in, path.string());
  return cfg;
}

}  // namespace gpcuq::io
