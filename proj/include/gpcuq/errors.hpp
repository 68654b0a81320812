#pragma once

#include <stdexcept>
#include <string>

namespace gpcuq {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A point or argument lies outside the admissible domain.
class DomainError : public Error {
  using Error::Error;
};

/// Vector or matrix extents do not agree.
class ShapeError : public Error {
  using Error::Error;
};

/// A requested object would be too large to represent or allocate.
class SizeError : public Error {
  using Error::Error;
};

/// A reduced dimension or index is out of range.
class DimensionError : public Error {
  using Error::Error;
};

/// Factorizations or iterations that fail to produce a usable result.
class NumericalError : public Error {
  using Error::Error;
};

/// Relative error of an all-zero coefficient column is undefined.
class DegenerateColumnError : public Error {
  using Error::Error;
};

class MeshError : public Error {
  using Error::Error;
};

/// Newton iteration or residual evaluation broke down inside a time step.
class ConvergenceError : public Error {
  using Error::Error;
};

/// A parametric model failed at one collocation node.
class ModelEvaluationError : public Error {
 public:
  ModelEvaluationError(std::size_t node, std::string point, const std::string& what)
      : Error("model failed at node " + std::to_string(node) + " (p = " + point + "): " + what),
        node_(node),
        point_(std::move(point)) {}

  std::size_t node() const noexcept { return node_; }
  const std::string& point() const noexcept { return point_; }

 private:
  std::size_t node_;
  std::string point_;
};

class ConfigError : public Error {
  using Error::Error;
};

/// Cached node solutions were produced for a different rule or model.
class StaleCacheError : public Error {
  using Error::Error;
};

}  // namespace gpcuq
