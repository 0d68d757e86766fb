#include <cmath>
#include <numbers>
#include <random>

#include "coboson/dynamics.hpp"
#include "coboson/errors.hpp"
#include "doctest.h"

using namespace coboson;
using std::numbers::pi;

namespace {

const std::vector<cplx> kSiteOne{1.0, 0.0};

TwoSiteSystem degenerate(double v, double g1, double g2) { return {0.0, 0.0, v, g1, g2}; }

// Closed form evaluated with the opposite root -Omega.
double p12_flipped_branch(const TwoSiteSystem& sys, double t) {
  const cplx omega = -sys.omega();
  const double v = sys.coupling();
  return 2.0 * v * v / std::norm(omega) * std::exp(-sys.mean_decay() * t) *
         (std::cosh(omega.imag() * t) - std::cos(omega.real() * t));
}

}  // namespace

TEST_CASE("derived quantities of the two-site system") {
  const TwoSiteSystem sys(0.3, 1.1, 0.7, 0.2, 0.6);
  CHECK(sys.detuning() == doctest::Approx(0.8));
  CHECK(sys.mean_decay() == doctest::Approx(0.4));
  CHECK(sys.half_decay_difference() == doctest::Approx(0.2));
  const cplx omega = sys.omega();
  const cplx expected = 4.0 * 0.49 + std::pow(cplx(0.8, -0.2), 2);
  CHECK(std::abs(omega * omega - expected) <= 1e-14 * std::abs(expected));
  CHECK(omega.real() >= 0.0);

  const TwoSiteSystem hermitian(0.0, 0.5, 1.0, 0.0, 0.0);
  CHECK(hermitian.omega().imag() == 0.0);
  CHECK(hermitian.omega().real() == doctest::Approx(std::sqrt(4.25)).epsilon(1e-15));

  // On the negative real axis the root takes Im >= 0.
  const auto ep_side = degenerate(0.1, 0.0, 1.0);
  CHECK(ep_side.omega().real() == 0.0);
  CHECK(ep_side.omega().imag() > 0.0);

  CHECK_THROWS_AS(TwoSiteSystem(0, 0, -1.0, 0, 0), DomainError);
  CHECK_THROWS_AS(TwoSiteSystem(0, 0, 1.0, -0.1, 0), DomainError);
  CHECK_THROWS_AS(TwoSiteSystem(0, 0, 1.0, 0, NAN), DomainError);

  const auto from_dev = TwoSiteSystem::from_deviations(0, 0.5, 1.0, {2.0, 0.1}, {1.0, 0.3});
  CHECK(from_dev.gamma1() == doctest::Approx(0.2));
  CHECK(from_dev.gamma2() == doctest::Approx(0.3));
}

TEST_CASE("closed-form transfer probability") {
  CHECK(p12_closed(degenerate(1.0, 0.0, 0.0), pi / 2) == doctest::Approx(1.0).epsilon(1e-15));
  const auto damped = degenerate(1.0, 0.1, 0.1);
  CHECK(p12_closed(damped, pi / 2) == doctest::Approx(std::exp(-0.05 * pi)).epsilon(1e-14));
  CHECK(p12_closed(damped, pi / 2) == doctest::Approx(0.854636).epsilon(1e-6));
  CHECK(std::abs(p12_closed(damped, pi)) < 1e-15);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const TwoSiteSystem sys(u(rng), u(rng), u(rng), u(rng), u(rng));
    CHECK(p12_closed(sys, 0.0) == 0.0);
    for (double t : {0.3, 2.0, 9.0}) {
      CHECK(std::abs(p12_closed(sys, t) - p12_flipped_branch(sys, t)) < 1e-12);
      CHECK(p12_closed(sys, t) >= 0.0);
      CHECK(p12_closed(sys, t) <= 1.0 + 1e-12);
    }
  }
  CHECK(p12_closed(degenerate(0.0, 0.3, 0.1), 1.0) == 0.0);
  CHECK_THROWS_AS(p12_closed(degenerate(0.25, 0.0, 1.0), 1.0), DomainError);
  CHECK_THROWS_AS(p12_closed(damped, -1.0), DomainError);
  // Large times: no overflow from cosh.
  CHECK(std::isfinite(p12_closed(degenerate(0.01, 0.0, 5.0), 5000.0)));
}

TEST_CASE("propagator matches the closed form") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  int tested = 0;
  while (tested < 50) {
    const TwoSiteSystem sys(0.0, w(rng), u(rng), u(rng), u(rng));
    if (std::abs(sys.omega()) < 1e-3) continue;
    ++tested;
    const auto traj = propagate(sys, kSiteOne, 20.0, 0.05);
    REQUIRE(traj.size() == 401);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k)
      worst = std::max(worst, std::abs(traj.population(k, 1) - p12_closed(sys, traj.times[k])));
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("degenerate damped population difference") {
  const auto sys = degenerate(1.0, 0.1, 0.1);
  const auto traj = propagate(sys, kSiteOne, pi, pi / 100);
  const std::size_t last = traj.size() - 1;
  CHECK(traj.times[last] == doctest::Approx(pi));
  const double delta_p = traj.population(last, 0) - traj.population(last, 1);
  CHECK(delta_p == doctest::Approx(std::exp(-0.1 * pi)).epsilon(1e-12));
  CHECK(delta_p == doctest::Approx(0.730402).epsilon(1e-6));
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    const double dp = traj.population(k, 0) - traj.population(k, 1);
    CHECK(std::abs(dp - std::exp(-0.1 * t) * std::cos(2.0 * t)) < 1e-12);
  }
}

TEST_CASE("initial populations and norm bookkeeping") {
  const TwoSiteSystem sys(0.0, 0.4, 0.8, 0.3, 0.05);
  const std::vector<cplx> psi0{cplx(0.6, 0.0), cplx(0.0, 0.8)};
  const auto traj = propagate(sys, psi0, 10.0, 0.1);
  CHECK(traj.population(0, 0) == std::norm(psi0[0]));
  CHECK(traj.population(0, 1) == std::norm(psi0[1]));
  CHECK(traj.norm[0] == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t k = 1; k < traj.size(); ++k) {
    CHECK(traj.norm[k] <= traj.norm[k - 1] + 1e-14);
    CHECK(std::abs(traj.norm[k] - traj.population(k, 0) - traj.population(k, 1)) < 1e-15);
    CHECK(traj.norm[k] < 1.0);
  }
  CHECK_THROWS_AS(propagate(sys, std::vector<cplx>{1.0, 1.0}, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(propagate(sys, std::vector<cplx>{1.0}, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(propagate(sys, kSiteOne, 1.0, 0.0), DomainError);
}

TEST_CASE("hermitian limit") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const double v = u(rng);
    const double w0 = w(rng);
    const TwoSiteSystem sys(0.0, w0, v, 0.0, 0.0);
    const double omega = std::sqrt(4 * v * v + w0 * w0);
    const auto traj = propagate(sys, kSiteOne, 20.0, 0.1);
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double t = traj.times[k];
      CHECK(std::abs(traj.norm[k] - 1.0) < 1e-10);
      const double s = std::sin(omega * t / 2);
      CHECK(std::abs(p12_closed(sys, t) - 4 * v * v / (omega * omega) * s * s) < 1e-12);
    }
  }
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(degenerate(1.0, 0.0, 0.2)).regime == Regime::coherent);
  CHECK(classify_regime(degenerate(0.1, 0.0, 1.0)).regime == Regime::incoherent);
  CHECK(classify_regime(degenerate(0.25, 0.0, 1.0)).regime == Regime::exceptional);
  CHECK_FALSE(classify_regime(degenerate(0.25, 0.0, 1.0)).extension);
  // Mirrored rates classify the same way.
  CHECK(classify_regime(degenerate(0.1, 1.0, 0.0)).regime == Regime::incoherent);

  const auto detuned = classify_regime(TwoSiteSystem(0.0, 0.5, 0.1, 0.0, 1.0));
  CHECK(detuned.extension);
  CHECK(detuned.regime == Regime::coherent);  // 0.04 + 0.25 > 0.25
  CHECK(classify_regime(TwoSiteSystem(0.0, 0.1, 0.1, 0.0, 1.0)).regime == Regime::incoherent);
  CHECK(std::string(regime_name(Regime::exceptional)) == "exceptional");
}

TEST_CASE("exceptional point location") {
  const auto ep = find_exceptional_point(0.0, 1.0, 0.0);
  REQUIRE(ep.critical_coupling.has_value());
  CHECK(*ep.critical_coupling == 0.25);
  CHECK(ep.reason == EpAbsence::none);

  const auto hermitian = find_exceptional_point(0.4, 0.4, 1.3);
  CHECK_FALSE(hermitian.critical_coupling.has_value());
  CHECK(hermitian.reason == EpAbsence::hermitian);

  const auto detuned = find_exceptional_point(0.0, 1.0, 0.3);
  CHECK_FALSE(detuned.critical_coupling.has_value());
  CHECK(detuned.reason == EpAbsence::detuned);
  CHECK_THROWS_AS(find_exceptional_point(-1.0, 1.0, 0.0), DomainError);

  // Omega vanishes at the located coupling.
  const auto at = degenerate(*ep.critical_coupling, 0.0, 1.0);
  CHECK(std::abs(at.omega()) == 0.0);
}

TEST_CASE("eigenvalues") {
  const TwoSiteSystem hermitian(1.0, 1.0, 1.0, 0.0, 0.0);
  const auto [a, b] = eigenvalues(hermitian);
  CHECK(a == cplx(0.0, 0.0));
  CHECK(b == cplx(2.0, 0.0));

  const auto ep = degenerate(0.25, 0.0, 1.0);
  const auto [c, d] = eigenvalues(ep);
  CHECK(c == ep.mean_eigenvalue());
  CHECK(d == ep.mean_eigenvalue());

  // Against a general-purpose eigensolver.
  const TwoSiteSystem sys(0.2, -0.7, 0.9, 0.4, 1.3);
  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(Eigen::MatrixXcd(sys.generator()));
  const auto [lo, hi] = eigenvalues(sys);
  const auto ev = solver.eigenvalues();
  const double err = std::min(std::abs(ev(0) - lo) + std::abs(ev(1) - hi),
                              std::abs(ev(0) - hi) + std::abs(ev(1) - lo));
  CHECK(err < 1e-12);
  CHECK(std::abs(std::abs(hi - lo) - std::abs(sys.omega())) < 1e-14);
}

TEST_CASE("square-root splitting near the exceptional point") {
  // Least-squares slope of log|Omega| against log(V - V_c), log-spaced offsets.
  const double vc = 0.25;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = 61;
  for (int i = 0; i < n; ++i) {
    const double offset = std::pow(10.0, -4.0 + 3.0 * i / (n - 1));
    const auto [lo, hi] = eigenvalues(degenerate(vc + offset, 0.0, 1.0));
    const double x = std::log(offset);
    const double y = std::log(std::abs(hi - lo));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(slope - 0.5) < 0.05);
}

TEST_CASE("exceptional point scan") {
  std::vector<double> vs;
  std::vector<double> gs;
  for (int i = 0; i <= 20; ++i) vs.push_back(0.5 * i / 20.0);
  for (int i = -10; i <= 10; ++i) gs.push_back(i / 10.0);
  const auto cells = ep_scan(vs, gs, 0.0);
  REQUIRE(cells.size() == vs.size() * gs.size());

  bool found = false;
  for (const auto& c : cells) {
    if (c.coupling == 0.25 && c.gamma_diff == 0.5) {
      found = true;
      CHECK(c.abs_omega_sq < 1e-20);
      CHECK(c.regime == Regime::exceptional);
      CHECK(c.coalescence > 0.999);
    }
    if (c.gamma_diff == 0.0 && c.coupling > 0.0) CHECK(c.coalescence < 1e-12);
  }
  CHECK(found);

  // Symmetric under gamma_diff -> -gamma_diff for omega0 = 0.
  const std::size_t width = gs.size();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const auto& a = cells[i * width + j];
      const auto& b = cells[i * width + (width - 1 - j)];
      CHECK(a.abs_omega_sq == b.abs_omega_sq);
      CHECK(a.regime == b.regime);
      CHECK(std::abs(a.coalescence - b.coalescence) < 1e-12);
    }
  }

  const std::vector<double> bad{0.1, 0.1};
  CHECK_THROWS_AS(ep_scan(bad, gs, 0.0), DomainError);
  CHECK_THROWS_AS(ep_scan({}, gs, 0.0), DomainError);
}

TEST_CASE("limit at the exceptional point") {
  const auto ep = degenerate(0.25, 0.0, 1.0);
  CHECK(ep_limit(ep, 0.0) == 0.0);
  CHECK(ep_limit(ep, 2.0) == doctest::Approx(0.25 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(ep_limit(ep, 2.0) == doctest::Approx(0.091970).epsilon(1e-5));
  CHECK_THROWS_AS(ep_limit(degenerate(1.0, 0.0, 1.0), 1.0), DomainError);

  // Continuity with the closed form at |Omega| = 1e-5.
  const double v = std::sqrt((0.25 + 1e-10) / 4.0);
  const auto near = degenerate(v, 0.0, 1.0);
  CHECK(std::abs(near.omega()) == doctest::Approx(1e-5).epsilon(1e-6));
  for (double t : {0.5, 2.0, 7.0}) CHECK(std::abs(p12_closed(near, t) - ep_limit(ep, t)) < 1e-8);

  // The propagator 1e-6 away from the exceptional point, and exactly on it.
  const auto off = degenerate(0.25 + 1e-6, 0.0, 1.0);
  for (double t : {0.5, 2.0, 7.0}) {
    CHECK(std::abs(std::norm(evolve(off, kSiteOne, t)[1]) - ep_limit(ep, t)) < 1e-6);
    CHECK(std::abs(std::norm(evolve(ep, kSiteOne, t)[1]) - ep_limit(ep, t)) < 1e-15);
  }
}

TEST_CASE("network validation") {
  Eigen::MatrixXd c(2, 2);
  c << 0.0, 1.0, 1.0, 0.0;
  CHECK_NOTHROW(SiteNetwork({0, 0}, {0.1, 0.1}, c));
  CHECK_THROWS_AS(SiteNetwork({0, 0}, {0.1}, c), DomainError);
  CHECK_THROWS_AS(SiteNetwork({0, 0}, {0.1, -0.1}, c), DomainError);
  Eigen::MatrixXd asym(2, 2);
  asym << 0.0, 1.0, 0.9, 0.0;
  CHECK_THROWS_AS(SiteNetwork({0, 0}, {0, 0}, asym), DomainError);
  Eigen::MatrixXd diag(2, 2);
  diag << 1.0, 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(SiteNetwork({0, 0}, {0, 0}, diag), DomainError);
  CHECK_THROWS_AS(SiteNetwork({}, {}, Eigen::MatrixXd()), DomainError);
}

TEST_CASE("two-site network reproduces the exact propagator") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    const TwoSiteSystem sys(w(rng), w(rng), u(rng), u(rng), u(rng));
    const auto exact = propagate(sys, kSiteOne, 20.0, 0.1);
    const auto rk4 = propagate(SiteNetwork::from_two_site(sys), kSiteOne, 20.0, 0.1);
    REQUIRE(exact.size() == rk4.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < exact.size(); ++k)
      for (std::size_t s = 0; s < 2; ++s)
        worst = std::max(worst, std::abs(exact.population(k, s) - rk4.population(k, s)));
    CHECK(worst < 1e-9);
    CHECK(rk4.error_estimate < 1e-9 * 20.0);
  }
}

TEST_CASE("network norm accounting") {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
  c(0, 1) = c(1, 0) = 0.8;
  c(1, 2) = c(2, 1) = 0.5;
  const SiteNetwork closed({0.0, 0.2, -0.1}, {0, 0, 0}, c);
  const auto traj = propagate(closed, localized_state(3), 20.0, 0.05);
  for (double n : traj.norm) CHECK(std::abs(n - 1.0) < 1e-10);

  const SiteNetwork open({0.0, 0.2, -0.1}, {0.0, 0.1, 0.4}, c);
  const auto lossy = propagate(open, localized_state(3), 20.0, 0.05);
  CHECK(lossy.population(0, 0) == 1.0);
  for (std::size_t k = 1; k < lossy.size(); ++k) CHECK(lossy.norm[k] <= lossy.norm[k - 1]);
  CHECK(lossy.norm.back() < 1.0);
  CHECK_THROWS_AS(localized_state(3, 3), DomainError);
}
