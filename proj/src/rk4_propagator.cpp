#include "rk4_propagator.hpp"

#include <algorithm>
#include <cmath>

namespace coboson::detail {

namespace {

Eigen::MatrixXcd rk4_step(const Eigen::MatrixXcd& generator, double h) {
  const auto n = generator.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd x = std::complex<double>(0.0, -h) * generator;
  // I + X + X^2/2 + X^3/6 + X^4/24 in Horner form
  Eigen::MatrixXcd s = id + x / 4.0;
  s = id + (x * s) / 3.0;
  s = id + (x * s) / 2.0;
  s = id + x * s;
  return s;
}

}  // namespace

double infinity_norm(const Eigen::MatrixXcd& m) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, m.row(i).cwiseAbs().sum());
  return best;
}

Rk4Propagator::Rk4Propagator(const Eigen::MatrixXcd& generator, double interval,
                             double accuracy) {
  const double rho = infinity_norm(generator);
  substeps_ = rho > 0.0
                  ? std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(interval * rho / kStepScale)))
                  : 1;

  Eigen::MatrixXcd step_map;
  for (int refinement = 0;; ++refinement) {
    step_ = interval / static_cast<double>(substeps_);
    step_map = rk4_step(generator, step_);
    const Eigen::MatrixXcd half = rk4_step(generator, 0.5 * step_);
    const double per_step = (step_map - half * half).norm() * 16.0 / 15.0;
    error_rate_ = step_ > 0.0 ? per_step / step_ : 0.0;
    converged_ = error_rate_ <= accuracy;
    if (converged_ || refinement == kMaxRefinements) break;
    substeps_ *= 2;
  }

  const auto n = generator.rows();
  interval_map_ = Eigen::MatrixXcd::Identity(n, n);
  for (std::size_t k = 0; k < substeps_; ++k) interval_map_ = step_map * interval_map_;
}

}  // namespace coboson::detail
