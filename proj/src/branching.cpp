#include "coboson/branching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "coboson/errors.hpp"
#include "rk4_propagator.hpp"

namespace coboson {

namespace {

constexpr double kMaxQuadratureIntervals = 2e8;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Composite Simpson on N intervals alongside Simpson on the N/2 intervals
// formed by the even samples; N must be a multiple of 4.
class SimpsonPair {
 public:
  explicit SimpsonPair(std::size_t intervals) : n_(intervals) {}

  void add(std::size_t i, double f) {
    double wf = 2.0;
    if (i == 0 || i == n_) wf = 1.0;
    else if (i % 2 == 1) wf = 4.0;
    fine_.add(wf * f);
    if (i % 2 == 0) {
      const std::size_t j = i / 2;
      double wc = 2.0;
      if (j == 0 || i == n_) wc = 1.0;
      else if (j % 2 == 1) wc = 4.0;
      coarse_.add(wc * f);
    }
  }

  double fine(double h) const { return fine_.value() * h / 3.0; }
  double coarse(double h) const { return coarse_.value() * 2.0 * h / 3.0; }

 private:
  struct Neumaier {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
      const double t = sum + x;
      if (std::abs(sum) >= std::abs(x))
        carry += (sum - t) + x;
      else
        carry += (x - t) + sum;
      sum = t;
    }
    double value() const { return sum + carry; }
  };

  std::size_t n_;
  Neumaier fine_;
  Neumaier coarse_;
};

std::size_t simpson_intervals(double span, double step) {
  const double raw = std::ceil(span / step);
  if (!(raw <= kMaxQuadratureIntervals))
    throw AccuracyError("quadrature would need " + fmt(raw) +
                        " intervals; decay is too slow for the requested tolerance");
  auto n = static_cast<std::size_t>(std::max(raw, 8.0));
  n = (n + 3) / 4 * 4;
  return n;
}

void require_tolerance(double tol) {
  if (!std::isfinite(tol) || tol <= 0.0 || tol >= 1.0)
    throw DomainError("tol must lie in (0, 1) (got " + fmt(tol) + ")");
}

void require_horizon(double horizon) {
  if (!std::isfinite(horizon) || horizon < 0.0)
    throw DomainError("horizon >= 0 required (got " + fmt(horizon) + ")");
}

}  // namespace

// ---------------------------------------------------------------------------

double f2_closed(const TwoSiteSystem& sys) {
  const double g1 = sys.gamma1();
  const double g2 = sys.gamma2();
  if (!(g1 > 0.0) || !(g2 > 0.0))
    throw DomainError("f2_closed requires both decay channels open: gamma1 > 0 and gamma2 > 0 "
                      "(use the time-domain route for a closed channel)");
  const double v2 = sys.coupling() * sys.coupling();
  const double w0 = sys.detuning();
  const double gd = sys.mean_decay();
  return (1.0 + g2 / g1) * v2 / (w0 * w0 + gd * gd * (1.0 + 4.0 * v2 / (g2 * g1)));
}

double f1_closed(const TwoSiteSystem& sys) { return 1.0 - f2_closed(sys); }

QuadratureEstimate channel_fraction_time_domain(const TwoSiteSystem& sys, int channel,
                                                double horizon, double tol) {
  if (channel != 1 && channel != 2)
    throw DomainError("channel must be 1 or 2 (got " + std::to_string(channel) + ")");
  require_horizon(horizon);
  require_tolerance(tol);

  const double rate = channel == 1 ? sys.gamma1() : sys.gamma2();
  const double v = sys.coupling();
  if (rate == 0.0) return {0.0, 0.0, horizon};
  if (v == 0.0) return {channel == 1 ? 1.0 : 0.0, 0.0, horizon};

  const cplx omega = sys.omega();
  const double gd = sys.mean_decay();
  const double kappa = gd - std::abs(omega.imag());
  if (!(kappa > 1e-14 * std::max(gd, std::abs(omega))))
    throw DomainError("time-domain branching needs decaying populations (gamma_d = " + fmt(gd) +
                      ", slowest population decay rate = " + fmt(kappa) + ")");

  // |psi_k(t)| <= e^{-kappa t / 2} (c0 + c1 min(t, 2/|Omega|)) for psi(0) = (1, 0).
  const double c0 = channel == 1 ? 1.0 : 0.0;
  const double c1 = channel == 1 ? 0.5 * std::hypot(sys.detuning(), sys.half_decay_difference()) : v;
  const double omega_abs = std::abs(omega);
  auto tail = [&](double t_end) {
    const double decay = std::exp(-kappa * t_end);
    const double a = c0 + c1 * t_end;
    double bound = decay * (a * a / kappa + 2.0 * c1 * a / (kappa * kappa) +
                            2.0 * c1 * c1 / (kappa * kappa * kappa));
    if (omega_abs > 0.0) {
      const double b = c0 + 2.0 * c1 / omega_abs;
      bound = std::min(bound, decay * b * b / kappa);
    }
    return rate * bound;
  };

  double t_end = horizon;
  if (t_end == 0.0) {
    t_end = std::log(1.0 / tol) / kappa;
    for (int i = 0; i < 400 && tail(t_end) > tol; ++i) t_end *= 1.25;
  }

  const double rho = std::abs(omega.real()) + std::abs(omega.imag()) + gd;
  const std::size_t n = simpson_intervals(t_end, 0.04 / rho);
  const double h = t_end / static_cast<double>(n);

  const bool exact_ep = sys.omega_squared() == cplx(0.0, 0.0);
  const std::array<cplx, 2> start{cplx(1.0, 0.0), cplx(0.0, 0.0)};
  SimpsonPair simpson(n);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * h;
    double p;
    if (channel == 2)
      p = exact_ep ? v * v * t * t * std::exp(-gd * t) : p12_closed(sys, t);
    else
      p = std::norm(evolve(sys, start, t)[0]);
    simpson.add(i, p);
  }
  const double fine = simpson.fine(h);
  const double coarse = simpson.coarse(h);
  return {rate * fine, rate * std::abs(fine - coarse) / 15.0 + tail(t_end), t_end};
}

QuadratureEstimate f2_time_domain(const TwoSiteSystem& sys, double horizon, double tol) {
  return channel_fraction_time_domain(sys, 2, horizon, tol);
}

// ---------------------------------------------------------------------------

SpectralEstimate f2_spectral(const TwoSiteSystem& sys, double e_span, long n_points) {
  if (!std::isfinite(e_span) || e_span <= 0.0)
    throw DomainError("e_span > 0 required (got " + fmt(e_span) + ")");
  if (n_points < 1000)
    throw DomainError("n_points >= 1000 required (got " + std::to_string(n_points) + ")");
  if (!(sys.mean_decay() > 0.0))
    throw DomainError("spectral branching needs gamma_d > 0 for the integral to converge");

  const double v = sys.coupling();
  if (v == 0.0) return {0.0, 0.0};

  const double w1 = sys.omega1();
  const double w2 = sys.omega2();
  const double half_g1 = 0.5 * sys.gamma1();
  const double half_g2 = 0.5 * sys.gamma2();
  const double center = 0.5 * (w1 + w2);

  auto n = static_cast<std::size_t>(n_points - 1);
  n = (n + 3) / 4 * 4;
  const double h = 2.0 * e_span / static_cast<double>(n);
  SimpsonPair simpson(n);
  for (std::size_t i = 0; i <= n; ++i) {
    const double e = center - e_span + static_cast<double>(i) * h;
    const cplx det = cplx(e - w1, half_g1) * cplx(e - w2, half_g2) - v * v;
    simpson.add(i, v * v / std::norm(det));
  }

  const auto [lo, hi] = eigenvalues(sys);
  const double radius = std::max(std::abs(lo - center), std::abs(hi - center));
  const double scale = sys.gamma2() / (2.0 * std::numbers::pi);
  double truncation = std::numeric_limits<double>::infinity();
  if (e_span > radius) {
    const double gap = e_span - radius;
    truncation = scale * 2.0 * v * v / (3.0 * gap * gap * gap);
  }
  return {scale * simpson.fine(h), truncation};
}

SpectralGrid recommended_spectral_grid(const TwoSiteSystem& sys, double target) {
  require_tolerance(target);
  const auto [lo, hi] = eigenvalues(sys);
  const double width = std::min(std::abs(lo.imag()), std::abs(hi.imag()));
  if (!(width > 0.0))
    throw DomainError("spectral branching needs every resonance to have a finite width");
  const double center = 0.5 * (sys.omega1() + sys.omega2());
  const double radius = std::max(std::abs(lo - center), std::abs(hi - center));
  const double v = sys.coupling();
  const double scale = 20.0 * std::max({std::abs(sys.detuning()), v, sys.mean_decay()});
  const double needed =
      radius + std::cbrt(sys.gamma2() * 2.0 * v * v / (3.0 * 2.0 * std::numbers::pi * target));
  const double e_span = std::max(scale, needed);
  const double intervals = std::ceil(2.0 * e_span / (width / 8.0));
  if (!(intervals <= kMaxQuadratureIntervals))
    throw AccuracyError("spectral grid would need " + fmt(intervals) + " points");
  return {e_span, static_cast<long>(intervals) + 1};
}

// ---------------------------------------------------------------------------

double recommended_horizon(const SiteNetwork& net, double tol) {
  require_tolerance(tol);
  const Eigen::MatrixXcd h = net.generator();
  const double rho = std::max(1.0, detail::infinity_norm(h));
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw AccuracyError("network eigendecomposition failed");

  double slowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const double rate = -solver.eigenvalues()(k).imag();
    if (rate > 1e-12 * rho) slowest = std::min(slowest, rate);
  }
  if (!std::isfinite(slowest)) return 0.0;

  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(solver.eigenvectors());
  const auto& sv = svd.singularValues();
  double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : 1e12;
  cond = std::clamp(cond, 1.0, 1e12);
  return (std::log(1.0 / tol) + 2.0 * std::log(cond)) / (2.0 * slowest);
}

BranchingResult network_branching(const SiteNetwork& net, std::span<const cplx> initial,
                                  double horizon, double tol) {
  const std::size_t m = net.site_count();
  if (initial.size() != m)
    throw DomainError("initial state has " + std::to_string(initial.size()) +
                      " amplitudes, expected " + std::to_string(m));
  double norm0 = 0.0;
  for (const cplx& a : initial) norm0 += std::norm(a);
  if (!std::isfinite(norm0) || std::abs(norm0 - 1.0) > 1e-12)
    throw DomainError("initial state must be normalized to 1 (norm^2 = " + fmt(norm0) + ")");
  require_horizon(horizon);

  const double suggested = recommended_horizon(net, tol);
  if (horizon > 0.0 && horizon < suggested)
    throw AccuracyError("horizon " + fmt(horizon) + " too short for tol " + fmt(tol) +
                        "; suggested horizon >= " + fmt(suggested));
  const double t_end = horizon > 0.0 ? horizon : suggested;

  BranchingResult result;
  result.fractions.assign(m, 0.0);
  result.horizon = t_end;
  if (t_end == 0.0) {
    result.survival = norm0;
    return result;
  }

  const Eigen::MatrixXcd h = net.generator();
  const double rho = detail::infinity_norm(h);
  const std::size_t n = simpson_intervals(t_end, 0.02 / rho);
  const double step = t_end / static_cast<double>(n);
  const detail::Rk4Propagator prop(h, step, kNetworkAccuracy);
  if (!prop.converged())
    throw AccuracyError("network branching: RK4 step check failed (estimated error " +
                        fmt(prop.error_rate()) + " per unit time)");

  std::vector<SimpsonPair> simpson(m, SimpsonPair(n));
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) psi(static_cast<Eigen::Index>(i)) = initial[i];
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) psi = prop.interval_map() * psi;
    for (std::size_t i = 0; i < m; ++i) simpson[i].add(k, std::norm(psi(static_cast<Eigen::Index>(i))));
  }

  double estimate = 2.0 * prop.error_rate() * t_end;
  for (std::size_t i = 0; i < m; ++i) {
    const double gamma = net.decays()[i];
    const double fine = simpson[i].fine(step);
    result.fractions[i] = gamma * fine;
    estimate += gamma * std::abs(fine - simpson[i].coarse(step)) / 15.0;
  }
  result.survival = psi.squaredNorm();
  result.error_estimate = estimate;
  return result;
}

}  // namespace coboson
