// Builds a degree-3 chaos surrogate of a closed-form three-parameter model,
// then compares the full, sparsified and POD-reduced surrogates at a few
// random points.

#include <cstdio>
#include <random>
#include <vector>

#include "gpcuq/chaos_basis.hpp"
#include "gpcuq/collocation.hpp"
#include "gpcuq/pod.hpp"
#include "gpcuq/quadrature.hpp"
#include "gpcuq/sparsification.hpp"
#include "gpcuq/synthetic_models.hpp"

int main() {
  using namespace gpcuq;
  const std::vector<double> means = {1.0, 2.0, 3.0};
  const auto space = ParameterSpace::uniform_box(means);
  const SyntheticModel model("smooth", space, uniform_time_grid(1.0, 0.01));

  const auto rule = stroud5(3);
  const auto set = total_degree_set(3, 3);
  const auto coeffs = collocate(model, rule, set, space);
  std::printf("%zu basis functions, %ld nodes, %ld snapshots\n", set.size(), static_cast<long>(rule.size()),
              static_cast<long>(coeffs.cols()));

  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const auto rep = global_set(coeffs, eps);
    std::printf("eps %.0e: %zu of %zu basis functions\n", eps, rep.global_set.size(), set.size());
  }
  for (const auto& p : pod_error_curve(coeffs, {1, 2, 3, 4, 6, 8})) {
    std::printf("POD rank %ld: max relative error %.2e\n", static_cast<long>(p.r), p.max_relative_error);
  }

  const auto [basis, reduced] = pod(coeffs, 4);
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t t = 50;
  for (int k = 0; k < 3; ++k) {
    const Eigen::VectorXd p = space.to_physical(Eigen::Vector3d(u(gen), u(gen), u(gen)));
    std::printf("t=%.2f  model %.6f  gPC %.6f  POD(4) %.6f\n", model.times()[t], model.evaluate(p)[t],
                surrogate_eval(coeffs, t, space, p), reduced_surrogate_eval(basis, reduced, set, space, t, p));
  }
}
