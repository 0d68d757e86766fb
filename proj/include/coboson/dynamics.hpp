#pragma once

// Effective non-Hermitian tunneling dynamics (hbar = 1).
//
// Two sites with energies omega_k, decay rates gamma_k and real coupling V
// evolve under the generator
//
//   H = [ omega1 - i gamma1/2        V          ]
//       [        V           omega2 - i gamma2/2 ]
//
// whose eigenvalues are mu +/- Omega/2 with mu = (omega1 + omega2)/2 - i gamma_d/2
// and Omega = sqrt(4 V^2 + (omega0 - i gamma_bar)^2).

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace coboson {

using cplx = std::complex<double>;

/// gamma = scale * deviation, with scale an energy constant and deviation a
/// dimensionless bosonic deviation measure.
struct DecayChannel {
  double scale = 1.0;
  double deviation = 0.0;
  double rate() const noexcept { return scale * deviation; }
};

class TwoSiteSystem {
 public:
  /// Throws DomainError unless coupling and both rates are finite and >= 0.
  TwoSiteSystem(double omega1, double omega2, double coupling, double gamma1, double gamma2);

  static TwoSiteSystem from_deviations(double omega1, double omega2, double coupling,
                                       DecayChannel channel1, DecayChannel channel2);

  double omega1() const noexcept { return omega1_; }
  double omega2() const noexcept { return omega2_; }
  double coupling() const noexcept { return coupling_; }
  double gamma1() const noexcept { return gamma1_; }
  double gamma2() const noexcept { return gamma2_; }

  double detuning() const noexcept { return omega2_ - omega1_; }             // omega0
  double mean_decay() const noexcept { return 0.5 * (gamma1_ + gamma2_); }   // gamma_d
  double half_decay_difference() const noexcept { return 0.5 * (gamma2_ - gamma1_); }

  /// 4 V^2 + (omega0 - i gamma_bar)^2
  cplx omega_squared() const noexcept;
  /// Root with Re >= 0 (Im >= 0 when Re = 0).
  cplx omega() const noexcept;
  /// (omega1 + omega2)/2 - i gamma_d/2
  cplx mean_eigenvalue() const noexcept;

  Eigen::Matrix2cd generator() const;

  friend bool operator==(const TwoSiteSystem&, const TwoSiteSystem&) = default;

 private:
  double omega1_;
  double omega2_;
  double coupling_;
  double gamma1_;
  double gamma2_;
};

/// Branch of sqrt used for Omega.
cplx principal_root(cplx z) noexcept;

// ---------------------------------------------------------------------------
// Closed forms.

/// P_{1,2}(t) = 2V^2/|Omega|^2 e^{-gamma_d t} (cosh Omega_i t - cos Omega_r t)
/// for an excitation starting on site 1. Throws DomainError at |Omega| = 0
/// (use ep_limit there).
double p12_closed(const TwoSiteSystem& sys, double t);

/// |Omega| <= kExceptionalTolerance * scale counts as sitting on the exceptional
/// point, with scale = max(2V, |gamma_bar|, |omega0|).
inline constexpr double kExceptionalTolerance = 1e-6;

bool at_exceptional_point(const TwoSiteSystem& sys) noexcept;

/// Omega -> 0 limit of P_{1,2}: V^2 t^2 e^{-gamma_d t}.
double ep_limit(const TwoSiteSystem& sys, double t);

enum class Regime { coherent, incoherent, exceptional };

const char* regime_name(Regime regime) noexcept;

struct RegimeClassification {
  Regime regime;
  /// True when omega0 != 0: the label then comes from the sign of Re(Omega^2),
  /// which extends the degenerate-case definition.
  bool extension;
};

/// Degenerate case: coherent iff 2V > |gamma_bar|, exceptional when equal to
/// within 1e-12 relative.
RegimeClassification classify_regime(const TwoSiteSystem& sys);
RegimeClassification classify_regime(double coupling, double gamma_diff, double omega0);

enum class EpAbsence { none, detuned, hermitian };

const char* ep_absence_name(EpAbsence reason) noexcept;

struct ExceptionalPoint {
  std::optional<double> critical_coupling;
  EpAbsence reason = EpAbsence::none;
};

/// Omega = 0 needs omega0 * gamma_bar = 0 and 4V^2 = gamma_bar^2 - omega0^2, so
/// an exceptional point exists only for omega0 = 0 and gamma_bar != 0, at
/// V_c = |gamma_bar| / 2.
ExceptionalPoint find_exceptional_point(double gamma1, double gamma2, double omega0);

/// mu - Omega/2 and mu + Omega/2, sorted by real part then imaginary part.
std::pair<cplx, cplx> eigenvalues(const TwoSiteSystem& sys);

/// |<r1|r2>| / (|r1| |r2|) for the two right eigenvectors of the generator:
/// 0 for orthogonal eigenvectors, 1 when they coalesce.
double eigenvector_coalescence(double coupling, double gamma_diff, double omega0);

struct EpScanCell {
  double coupling;
  double gamma_diff;
  double abs_omega_sq;
  Regime regime;
  double coalescence;
};

/// Cells in row-major order (coupling outer, gamma_diff inner). Grids must be
/// non-empty and strictly increasing.
std::vector<EpScanCell> ep_scan(std::span<const double> coupling_grid,
                                std::span<const double> gamma_diff_grid, double omega0);

// ---------------------------------------------------------------------------
// Networks and propagation.

class SiteNetwork {
 public:
  /// couplings: symmetric (to 1e-12) with a zero diagonal.
  SiteNetwork(std::vector<double> energies, std::vector<double> decays, Eigen::MatrixXd couplings);

  static SiteNetwork from_two_site(const TwoSiteSystem& sys);

  std::size_t site_count() const noexcept { return energies_.size(); }
  const std::vector<double>& energies() const noexcept { return energies_; }
  const std::vector<double>& decays() const noexcept { return decays_; }
  const Eigen::MatrixXd& couplings() const noexcept { return couplings_; }

  /// Diagonal omega_k - i gamma_k/2, off-diagonal couplings.
  Eigen::MatrixXcd generator() const;

 private:
  std::vector<double> energies_;
  std::vector<double> decays_;
  Eigen::MatrixXd couplings_;
};

struct Trajectory {
  std::vector<double> times;
  std::size_t site_count = 0;
  std::vector<double> populations;  // times.size() x site_count, row-major
  std::vector<double> norm;
  /// Estimated bound on the amplitude error over the whole grid.
  double error_estimate = 0.0;

  std::size_t size() const noexcept { return times.size(); }
  double population(std::size_t step, std::size_t site) const {
    return populations[step * site_count + site];
  }
};

/// Amplitudes at time t from an arbitrary initial state, via the spectral
/// projectors of the 2x2 generator (Jordan form at the exceptional point).
std::array<cplx, 2> evolve(const TwoSiteSystem& sys, std::span<const cplx> initial, double t);

/// Exact two-site propagation on the grid t_k = k dt, k = 0..floor(t_max/dt).
Trajectory propagate(const TwoSiteSystem& sys, std::span<const cplx> initial, double t_max,
                     double dt);

/// Per-unit-time amplitude accuracy the network integrator must certify.
inline constexpr double kNetworkAccuracy = 1e-9;

/// Fixed-step classical RK4 on a substep of dt, validated against two half
/// steps (Richardson); throws AccuracyError with a recommended dt when the
/// estimate exceeds kNetworkAccuracy per unit time.
Trajectory propagate(const SiteNetwork& net, std::span<const cplx> initial, double t_max,
                     double dt);

/// Unit amplitude on one site, zero elsewhere.
std::vector<cplx> localized_state(std::size_t sites, std::size_t site = 0);

}  // namespace coboson
