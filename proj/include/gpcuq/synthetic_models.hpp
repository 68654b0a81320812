#pragma once

// Closed-form ParametricModels for testing and demonstrations. All of them are
// written in the reference coordinates x = to_reference(p) of a parameter box.
//
//   constant        y(t, x) = 1
//   linear          y(t, x) = 1 + t * sum_j x_j / (j + 1)
//   basis:a1,...,aq y(t, x) = Phi_a(x) for every t
//   smooth          y(t, x) = exp(-t (1 + 0.2 sum_j x_j / (j + 1))) + 0.1 sin(2 pi t + x_0)

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpcuq/chaos_basis.hpp"
#include "gpcuq/collocation.hpp"
#include "gpcuq/errors.hpp"
#include "gpcuq/stochastic_space.hpp"

namespace gpcuq {

inline std::vector<double> uniform_time_grid(double t_end, double dt) {
  if (!(t_end > 0.0) || !(dt > 0.0)) throw DomainError("time grid: t_end and dt must be positive");
  const long steps = std::lround(t_end / dt);
  if (steps < 1 || std::abs(steps * dt - t_end) > 1e-9 * t_end) {
    throw DomainError("time grid: t_end must be an integer multiple of dt");
  }
  std::vector<double> t;
  for (long s = 0; s <= steps; ++s) t.push_back(s * dt);
  return t;
}

class SyntheticModel : public ParametricModel {
 public:
  /// `spec` is one of the names listed at the top of this header.
  SyntheticModel(std::string spec, ParameterSpace space, std::vector<double> times)
      : spec_(std::move(spec)), space_(std::move(space)), times_(std::move(times)) {
    if (spec_ == "constant") {
      kind_ = Kind::constant;
    } else if (spec_ == "linear") {
      kind_ = Kind::linear;
    } else if (spec_ == "smooth") {
      kind_ = Kind::smooth;
    } else if (spec_.rfind("basis:", 0) == 0) {
      kind_ = Kind::basis;
      std::vector<int> a;
      std::istringstream in(spec_.substr(6));
      std::string tok;
      while (std::getline(in, tok, ',')) {
        try {
          std::size_t used = 0;
          a.push_back(std::stoi(tok, &used));
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw ConfigError("synthetic model: bad exponent '" + tok + "' in " + spec_);
        }
      }
      if (static_cast<Eigen::Index>(a.size()) != space_.dim()) {
        throw ConfigError("synthetic model: " + spec_ + " needs " + std::to_string(space_.dim()) + " exponents");
      }
      basis_ = IndexSet(static_cast<int>(a.size()), {MultiIndex{a}});
    } else {
      throw ConfigError("unknown synthetic model '" + spec_ + "'");
    }
  }

  const std::vector<double>& times() const override { return times_; }

  std::string description() const override {
    std::ostringstream os;
    os.precision(17);
    os << "synthetic " << spec_ << " lo=" << space_.lo().transpose() << " hi=" << space_.hi().transpose();
    return os.str();
  }

  std::vector<double> evaluate(const Eigen::VectorXd& p) const override {
    const Eigen::VectorXd x = space_.to_reference(p);
    double weighted = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) weighted += x(j) / static_cast<double>(j + 1);
    const double phi = kind_ == Kind::basis ? eval_basis(basis_, x)(0) : 0.0;
    std::vector<double> y(times_.size());
    for (std::size_t k = 0; k < times_.size(); ++k) {
      const double t = times_[k];
      switch (kind_) {
        case Kind::constant: y[k] = 1.0; break;
        case Kind::linear: y[k] = 1.0 + t * weighted; break;
        case Kind::basis: y[k] = phi; break;
        case Kind::smooth:
          y[k] = std::exp(-t * (1.0 + 0.2 * weighted)) + 0.1 * std::sin(2.0 * std::numbers::pi * t + x(0));
          break;
      }
    }
    return y;
  }

 private:
  enum class Kind { constant, linear, basis, smooth };
  std::string spec_;
  Kind kind_ = Kind::constant;
  ParameterSpace space_;
  std::vector<double> times_;
  IndexSet basis_;
};

}  // namespace gpcuq
