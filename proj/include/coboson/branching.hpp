#pragma once

// Decay branching fractions: the probability that an excitation starting on
// site 1 is eventually lost through channel k,
//   F_k = gamma_k * integral_0^inf |psi_k(t)|^2 dt.
//
// Three routes for the two-site F_2: the Parseval closed form, time-domain
// quadrature of P_{1,2}(t), and frequency-domain quadrature of |G_{1,2}(E)|^2.

#include <cstddef>
#include <span>
#include <vector>

#include "coboson/dynamics.hpp"

namespace coboson {

/// F_2 = (1 + gamma2/gamma1) V^2 / (omega0^2 + gamma_d^2 (1 + 4V^2/(gamma1 gamma2))).
/// Throws DomainError unless both channels are open (gamma1, gamma2 > 0).
double f2_closed(const TwoSiteSystem& sys);

/// 1 - f2_closed.
double f1_closed(const TwoSiteSystem& sys);

struct QuadratureEstimate {
  double value = 0.0;
  /// Simpson step-halving estimate plus a bound on the truncated tail.
  double error_estimate = 0.0;
  double horizon = 0.0;
};

/// gamma_k * integral_0^horizon P_{1,k}(t) dt for channel k in {1, 2}.
/// horizon = 0 picks the shortest horizon whose tail bound is below tol.
/// Channel 2 integrates the closed-form P_{1,2}; channel 1 integrates
/// propagated amplitudes. Throws DomainError when the populations do not
/// decay (gamma_d = 0 or a dark state).
QuadratureEstimate channel_fraction_time_domain(const TwoSiteSystem& sys, int channel,
                                                double horizon, double tol);

QuadratureEstimate f2_time_domain(const TwoSiteSystem& sys, double horizon = 0.0,
                                  double tol = 1e-12);

struct SpectralEstimate {
  double value = 0.0;
  /// Bound on the integral outside [c - e_span, c + e_span]: |G_12|^2 <= V^2/(|E-c|-r)^4.
  double truncation = 0.0;
};

/// gamma2 * integral |G_12(E)|^2 dE / 2pi by composite Simpson over
/// [c - e_span, c + e_span] around the mean site energy c. n_points >= 1000.
SpectralEstimate f2_spectral(const TwoSiteSystem& sys, double e_span, long n_points);

struct SpectralGrid {
  double e_span;
  long n_points;
};

/// Window wide enough for the truncation bound to fall below target, sampled
/// at one eighth of the narrowest resonance half-width.
SpectralGrid recommended_spectral_grid(const TwoSiteSystem& sys, double target = 1e-8);

struct BranchingResult {
  std::vector<double> fractions;
  /// Norm left at the horizon.
  double survival = 0.0;
  double horizon = 0.0;
  double error_estimate = 0.0;
};

/// Shortest horizon after which decaying modes retain less than tol of the
/// norm (condition-number weighted); 0 when nothing decays.
double recommended_horizon(const SiteNetwork& net, double tol);

/// Per-site fractions from RK4 propagation and Simpson quadrature of the site
/// populations. horizon = 0 uses recommended_horizon; a shorter explicit
/// horizon raises AccuracyError naming the suggested one.
BranchingResult network_branching(const SiteNetwork& net, std::span<const cplx> initial,
                                  double horizon = 0.0, double tol = 1e-9);

}  // namespace coboson
