#include "coboson/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coboson/errors.hpp"
#include "rk4_propagator.hpp"

namespace coboson {

namespace {

constexpr cplx kI{0.0, 1.0};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require_non_negative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0)
    throw DomainError(std::string(name) + " >= 0 required (got " + fmt(value) + ")");
}

void require_finite(double value, const char* name) {
  if (!std::isfinite(value))
    throw DomainError(std::string(name) + " must be finite (got " + fmt(value) + ")");
}

void require_time(double t) {
  if (!std::isfinite(t) || t < 0.0) throw DomainError("t >= 0 required (got " + fmt(t) + ")");
}

void require_normalized(std::span<const cplx> initial, std::size_t sites) {
  if (initial.size() != sites)
    throw DomainError("initial state has " + std::to_string(initial.size()) +
                      " amplitudes, expected " + std::to_string(sites));
  double norm = 0.0;
  for (const cplx& a : initial) norm += std::norm(a);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-12)
    throw DomainError("initial state must be normalized to 1 (norm^2 = " + fmt(norm) + ")");
}

std::size_t grid_steps(double t_max, double dt) {
  if (!std::isfinite(dt) || dt <= 0.0) throw DomainError("dt > 0 required (got " + fmt(dt) + ")");
  if (!std::isfinite(t_max) || t_max < 0.0)
    throw DomainError("t_max >= 0 required (got " + fmt(t_max) + ")");
  const double steps = std::floor(t_max / dt + 1e-9);
  if (steps > 5e7) throw DomainError("time grid too large: t_max/dt = " + fmt(steps));
  return static_cast<std::size_t>(steps);
}

// e^{-gamma t} sinh^2(a), without overflow for large |a| t.
double damped_sinh_sq(double a, double gamma_t) {
  a = std::abs(a);
  if (a < 20.0) {
    const double s = std::sinh(a);
    return s * s * std::exp(-gamma_t);
  }
  return 0.25 * (std::exp(2.0 * a - gamma_t) - 2.0 * std::exp(-gamma_t) +
                 std::exp(-2.0 * a - gamma_t));
}

}  // namespace

// ---------------------------------------------------------------------------

TwoSiteSystem::TwoSiteSystem(double omega1, double omega2, double coupling, double gamma1,
                             double gamma2)
    : omega1_(omega1), omega2_(omega2), coupling_(coupling), gamma1_(gamma1), gamma2_(gamma2) {
  require_finite(omega1, "omega1");
  require_finite(omega2, "omega2");
  require_non_negative(coupling, "v");
  require_non_negative(gamma1, "gamma1");
  require_non_negative(gamma2, "gamma2");
}

TwoSiteSystem TwoSiteSystem::from_deviations(double omega1, double omega2, double coupling,
                                             DecayChannel channel1, DecayChannel channel2) {
  require_non_negative(channel1.scale, "scale1");
  require_non_negative(channel2.scale, "scale2");
  require_non_negative(channel1.deviation, "delta1");
  require_non_negative(channel2.deviation, "delta2");
  return TwoSiteSystem(omega1, omega2, coupling, channel1.rate(), channel2.rate());
}

cplx TwoSiteSystem::omega_squared() const noexcept {
  const double w0 = detuning();
  const double gbar = half_decay_difference();
  return {4.0 * coupling_ * coupling_ + w0 * w0 - gbar * gbar, -2.0 * w0 * gbar};
}

cplx TwoSiteSystem::omega() const noexcept { return principal_root(omega_squared()); }

cplx TwoSiteSystem::mean_eigenvalue() const noexcept {
  return {0.5 * (omega1_ + omega2_), -0.5 * mean_decay()};
}

Eigen::Matrix2cd TwoSiteSystem::generator() const {
  Eigen::Matrix2cd h;
  h << cplx(omega1_, -0.5 * gamma1_), coupling_, coupling_, cplx(omega2_, -0.5 * gamma2_);
  return h;
}

cplx principal_root(cplx z) noexcept {
  cplx r = std::sqrt(z);
  if (r.real() == 0.0 && r.imag() < 0.0) r = -r;
  return r;
}

// ---------------------------------------------------------------------------

double p12_closed(const TwoSiteSystem& sys, double t) {
  require_time(t);
  const double v = sys.coupling();
  if (v == 0.0) return 0.0;
  const double omega_abs_sq = std::abs(sys.omega_squared());
  if (omega_abs_sq == 0.0)
    throw DomainError("exceptional point (|Omega| = 0): closed form is singular, use ep_limit");
  const cplx omega = sys.omega();
  const double gamma_t = sys.mean_decay() * t;
  // cosh a - cos b = 2 (sinh^2(a/2) + sin^2(b/2)) avoids cancellation near |Omega| t -> 0.
  const double s = std::sin(0.5 * omega.real() * t);
  const double osc = s * s * std::exp(-gamma_t);
  const double growth = damped_sinh_sq(0.5 * omega.imag() * t, gamma_t);
  return 4.0 * v * v / omega_abs_sq * (growth + osc);
}

bool at_exceptional_point(const TwoSiteSystem& sys) noexcept {
  const double scale = std::max({2.0 * sys.coupling(), std::abs(sys.half_decay_difference()),
                                 std::abs(sys.detuning())});
  return std::sqrt(std::abs(sys.omega_squared())) <= kExceptionalTolerance * scale;
}

double ep_limit(const TwoSiteSystem& sys, double t) {
  require_time(t);
  if (!at_exceptional_point(sys))
    throw DomainError("ep_limit: system is not at an exceptional point (|Omega| = " +
                      fmt(std::abs(sys.omega())) + ")");
  const double v = sys.coupling();
  return v * v * t * t * std::exp(-sys.mean_decay() * t);
}

const char* regime_name(Regime regime) noexcept {
  switch (regime) {
    case Regime::coherent: return "coherent";
    case Regime::incoherent: return "incoherent";
    case Regime::exceptional: return "exceptional";
  }
  return "unknown";
}

RegimeClassification classify_regime(double coupling, double gamma_diff, double omega0) {
  if (omega0 == 0.0) {
    const double a = 2.0 * coupling;
    const double b = std::abs(gamma_diff);
    if (std::abs(a - b) <= 1e-12 * std::max(a, b)) return {Regime::exceptional, false};
    return {a > b ? Regime::coherent : Regime::incoherent, false};
  }
  const double positive = 4.0 * coupling * coupling + omega0 * omega0;
  const double negative = gamma_diff * gamma_diff;
  const double re = positive - negative;
  if (std::abs(re) <= 1e-12 * std::max(positive, negative)) return {Regime::exceptional, true};
  return {re > 0.0 ? Regime::coherent : Regime::incoherent, true};
}

RegimeClassification classify_regime(const TwoSiteSystem& sys) {
  return classify_regime(sys.coupling(), sys.half_decay_difference(), sys.detuning());
}

const char* ep_absence_name(EpAbsence reason) noexcept {
  switch (reason) {
    case EpAbsence::none: return "none";
    case EpAbsence::detuned: return "detuned";
    case EpAbsence::hermitian: return "hermitian";
  }
  return "unknown";
}

ExceptionalPoint find_exceptional_point(double gamma1, double gamma2, double omega0) {
  require_non_negative(gamma1, "gamma1");
  require_non_negative(gamma2, "gamma2");
  require_finite(omega0, "omega0");
  const double gbar = 0.5 * (gamma2 - gamma1);
  if (gbar == 0.0) return {std::nullopt, EpAbsence::hermitian};
  if (omega0 != 0.0) return {std::nullopt, EpAbsence::detuned};
  return {0.5 * std::abs(gbar), EpAbsence::none};
}

std::pair<cplx, cplx> eigenvalues(const TwoSiteSystem& sys) {
  const cplx mu = sys.mean_eigenvalue();
  const cplx half = 0.5 * sys.omega();
  cplx a = mu - half;
  cplx b = mu + half;
  auto less = [](cplx x, cplx y) {
    return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
  };
  if (less(b, a)) std::swap(a, b);
  return {a, b};
}

double eigenvector_coalescence(double coupling, double gamma_diff, double omega0) {
  // Traceless part [[-d/2, V], [V, d/2]], d = omega0 - i gamma_bar, eigenvalues +/- Omega/2.
  const cplx d(omega0, -gamma_diff);
  const cplx omega = principal_root(4.0 * coupling * coupling + d * d);
  using Vec = Eigen::Vector2cd;
  auto pick = [](const Vec& u, const Vec& w) { return u.norm() >= w.norm() ? u : w; };
  const Vec plus = pick(Vec(coupling, 0.5 * (omega + d)), Vec(0.5 * (omega - d), coupling));
  const Vec minus = pick(Vec(coupling, 0.5 * (d - omega)), Vec(-0.5 * (omega + d), coupling));
  const double norms = plus.norm() * minus.norm();
  if (norms == 0.0) return 0.0;
  return std::min(1.0, std::abs(plus.dot(minus)) / norms);
}

std::vector<EpScanCell> ep_scan(std::span<const double> coupling_grid,
                                std::span<const double> gamma_diff_grid, double omega0) {
  auto check_grid = [](std::span<const double> grid, const char* name) {
    if (grid.empty()) throw DomainError(std::string(name) + " grid must be non-empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      require_finite(grid[i], name);
      if (i > 0 && !(grid[i] > grid[i - 1]))
        throw DomainError(std::string(name) + " grid must be strictly increasing");
    }
  };
  check_grid(coupling_grid, "v");
  check_grid(gamma_diff_grid, "gamma_diff");
  require_finite(omega0, "omega0");
  require_non_negative(coupling_grid.front(), "v");

  std::vector<EpScanCell> cells;
  cells.reserve(coupling_grid.size() * gamma_diff_grid.size());
  for (double v : coupling_grid) {
    for (double g : gamma_diff_grid) {
      const cplx omega_sq(4.0 * v * v + omega0 * omega0 - g * g, -2.0 * omega0 * g);
      cells.push_back({v, g, std::abs(omega_sq), classify_regime(v, g, omega0).regime,
                       eigenvector_coalescence(v, g, omega0)});
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------

SiteNetwork::SiteNetwork(std::vector<double> energies, std::vector<double> decays,
                         Eigen::MatrixXd couplings)
    : energies_(std::move(energies)), decays_(std::move(decays)), couplings_(std::move(couplings)) {
  const auto m = energies_.size();
  if (m == 0) throw DomainError("network: at least one site required");
  if (decays_.size() != m)
    throw DomainError("network: decays has " + std::to_string(decays_.size()) +
                      " entries, expected " + std::to_string(m));
  if (static_cast<std::size_t>(couplings_.rows()) != m ||
      static_cast<std::size_t>(couplings_.cols()) != m)
    throw DomainError("network: couplings must be " + std::to_string(m) + "x" + std::to_string(m));
  for (double e : energies_) require_finite(e, "energies");
  for (double g : decays_) require_non_negative(g, "decays");
  for (Eigen::Index i = 0; i < couplings_.rows(); ++i) {
    if (std::abs(couplings_(i, i)) > 1e-12)
      throw DomainError("network: couplings diagonal must be zero (site " + std::to_string(i + 1) +
                        ")");
    for (Eigen::Index j = 0; j < couplings_.cols(); ++j) {
      require_finite(couplings_(i, j), "couplings");
      const double scale = std::max(1.0, std::abs(couplings_(i, j)));
      if (std::abs(couplings_(i, j) - couplings_(j, i)) > 1e-12 * scale)
        throw DomainError("network: couplings must be symmetric (sites " + std::to_string(i + 1) +
                          ", " + std::to_string(j + 1) + ")");
    }
  }
  couplings_ = 0.5 * (couplings_ + couplings_.transpose()).eval();
  couplings_.diagonal().setZero();
}

SiteNetwork SiteNetwork::from_two_site(const TwoSiteSystem& sys) {
  Eigen::MatrixXd c(2, 2);
  c << 0.0, sys.coupling(), sys.coupling(), 0.0;
  return SiteNetwork({sys.omega1(), sys.omega2()}, {sys.gamma1(), sys.gamma2()}, c);
}

Eigen::MatrixXcd SiteNetwork::generator() const {
  const auto m = static_cast<Eigen::Index>(site_count());
  Eigen::MatrixXcd h = couplings_.cast<cplx>();
  for (Eigen::Index k = 0; k < m; ++k)
    h(k, k) = cplx(energies_[static_cast<std::size_t>(k)], -0.5 * decays_[static_cast<std::size_t>(k)]);
  return h;
}

// ---------------------------------------------------------------------------

std::array<cplx, 2> evolve(const TwoSiteSystem& sys, std::span<const cplx> initial, double t) {
  require_time(t);
  if (initial.size() != 2) throw DomainError("two-site initial state needs 2 amplitudes");
  const double v = sys.coupling();
  const cplx d(sys.detuning(), -sys.half_decay_difference());
  const cplx omega = sys.omega();
  const cplx mu = sys.mean_eigenvalue();
  const cplx x = 0.5 * omega * t;

  // exp(-iHt) = C I - i S A with A the traceless part, C = e^{-i mu t} cos x and
  // S = e^{-i mu t} sin x / (Omega/2).
  cplx c;
  cplx s;
  if (std::abs(x) < 1e-3) {
    const cplx z = x * x;
    const cplx phase = std::exp(-kI * mu * t);
    c = phase * (1.0 - z / 2.0 + z * z / 24.0);
    s = phase * t * (1.0 - z / 6.0 + z * z / 120.0);
  } else {
    const cplx e_plus = std::exp(-kI * (mu + 0.5 * omega) * t);
    const cplx e_minus = std::exp(-kI * (mu - 0.5 * omega) * t);
    c = 0.5 * (e_plus + e_minus);
    s = (e_minus - e_plus) / (kI * omega);
  }
  const cplx a0 = -0.5 * d * initial[0] + v * initial[1];
  const cplx a1 = v * initial[0] + 0.5 * d * initial[1];
  return {c * initial[0] - kI * s * a0, c * initial[1] - kI * s * a1};
}

Trajectory propagate(const TwoSiteSystem& sys, std::span<const cplx> initial, double t_max,
                     double dt) {
  require_normalized(initial, 2);
  const std::size_t steps = grid_steps(t_max, dt);
  Trajectory traj;
  traj.site_count = 2;
  traj.times.reserve(steps + 1);
  traj.populations.reserve(2 * (steps + 1));
  traj.norm.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const auto psi = evolve(sys, initial, t);
    const double p1 = std::norm(psi[0]);
    const double p2 = std::norm(psi[1]);
    traj.times.push_back(t);
    traj.populations.push_back(p1);
    traj.populations.push_back(p2);
    traj.norm.push_back(p1 + p2);
  }
  return traj;
}

Trajectory propagate(const SiteNetwork& net, std::span<const cplx> initial, double t_max,
                     double dt) {
  const std::size_t m = net.site_count();
  require_normalized(initial, m);
  const std::size_t steps = grid_steps(t_max, dt);

  const Eigen::MatrixXcd h = net.generator();
  const detail::Rk4Propagator prop(h, dt, kNetworkAccuracy);
  if (!prop.converged()) {
    const double rho = detail::infinity_norm(h);
    throw AccuracyError("network propagation: RK4 step check failed (estimated error " +
                        fmt(prop.error_rate()) + " per unit time); recommended dt <= " +
                        fmt(detail::Rk4Propagator::kStepScale / rho));
  }

  Trajectory traj;
  traj.site_count = m;
  traj.error_estimate = prop.error_rate() * static_cast<double>(steps) * dt;
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) psi(static_cast<Eigen::Index>(i)) = initial[i];

  traj.times.reserve(steps + 1);
  traj.populations.reserve(m * (steps + 1));
  traj.norm.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    if (k > 0) psi = prop.interval_map() * psi;
    double total = 0.0;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      const double p = std::norm(psi(i));
      traj.populations.push_back(p);
      total += p;
    }
    traj.times.push_back(static_cast<double>(k) * dt);
    traj.norm.push_back(total);
  }
  return traj;
}

std::vector<cplx> localized_state(std::size_t sites, std::size_t site) {
  if (site >= sites)
    throw DomainError("initial site " + std::to_string(site + 1) + " outside 1.." +
                      std::to_string(sites));
  std::vector<cplx> psi(sites, cplx(0.0, 0.0));
  psi[site] = 1.0;
  return psi;
}

}  // namespace coboson
