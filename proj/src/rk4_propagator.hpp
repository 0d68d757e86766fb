#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace coboson::detail {

// Classical RK4 for psi' = -i H psi with a constant generator. For a linear
// system one RK4 step of size h is multiplication by the degree-4 Taylor
// polynomial of exp(-i H h), so an output interval is a fixed power of that
// step matrix. The step is validated against two half steps.
class Rk4Propagator {
 public:
  // Initial substep targets h * |H|_inf <= kStepScale; it is halved
  // (deterministically) until the Richardson estimate per unit time is below
  // `accuracy` or kMaxRefinements is reached.
  static constexpr double kStepScale = 0.005;
  static constexpr int kMaxRefinements = 8;

  Rk4Propagator(const Eigen::MatrixXcd& generator, double interval, double accuracy);

  const Eigen::MatrixXcd& interval_map() const noexcept { return interval_map_; }
  double step() const noexcept { return step_; }
  std::size_t substeps() const noexcept { return substeps_; }
  // Richardson estimate of the amplitude error per unit time.
  double error_rate() const noexcept { return error_rate_; }
  bool converged() const noexcept { return converged_; }

 private:
  Eigen::MatrixXcd interval_map_;
  double step_ = 0.0;
  std::size_t substeps_ = 1;
  double error_rate_ = 0.0;
  bool converged_ = true;
};

double infinity_norm(const Eigen::MatrixXcd& m);

}  // namespace coboson::detail
