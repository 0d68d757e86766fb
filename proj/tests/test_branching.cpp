#include <cmath>
#include <random>

#include "coboson/branching.hpp"
#include "coboson/errors.hpp"
#include "doctest.h"

using namespace coboson;

namespace {

TwoSiteSystem with_rates(double w0, double v, double g1, double g2) { return {0.0, w0, v, g1, g2}; }

}  // namespace

TEST_CASE("closed-form branching fraction") {
  CHECK(f2_closed(with_rates(0.3, 0.0, 0.2, 0.5)) == 0.0);
  CHECK(f2_closed(with_rates(0.0, 1e6, 0.1, 0.1)) == doctest::Approx(0.5).epsilon(1e-12));
  // 2 / (0.25 + 0.01 * 401)
  CHECK(f2_closed(with_rates(0.5, 1.0, 0.1, 0.1)) == doctest::Approx(2.0 / 4.26).epsilon(1e-14));
  CHECK(f2_closed(with_rates(0.5, 1.0, 0.1, 0.1)) == doctest::Approx(0.469484).epsilon(1e-6));
  CHECK(f1_closed(with_rates(0.5, 1.0, 0.1, 0.1)) == doctest::Approx(1.0 - 2.0 / 4.26));
  CHECK_THROWS_AS(f2_closed(with_rates(0.0, 1.0, 0.0, 1.0)), DomainError);
  CHECK_THROWS_AS(f2_closed(with_rates(0.0, 1.0, 1.0, 0.0)), DomainError);
}

TEST_CASE("time-domain quadrature agrees with the closed form") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rate(0.05, 1.0);
  std::uniform_real_distribution<double> coupling(0.0, 2.0);
  std::uniform_real_distribution<double> detuning(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const auto sys = with_rates(detuning(rng), coupling(rng), rate(rng), rate(rng));
    const auto q = f2_time_domain(sys);
    CHECK(std::abs(q.value - f2_closed(sys)) < 1e-6);
    CHECK(q.error_estimate < 1e-6);
    // Channel 1 from its own time integral: complementarity.
    const auto q1 = channel_fraction_time_domain(sys, 1, 0.0, 1e-12);
    CHECK(std::abs(q1.value + q.value - 1.0) < 1e-6);
  }
  CHECK(f2_time_domain(with_rates(0.2, 0.0, 0.0, 0.0)).value == 0.0);
  CHECK(f2_time_domain(with_rates(0.0, 1.0, 0.0, 0.0)).value == 0.0);
  CHECK_THROWS_AS(channel_fraction_time_domain(with_rates(0.0, 1.0, 0.1, 0.1), 3, 0.0, 1e-9),
                  DomainError);
}

TEST_CASE("explicit horizon reports its tail") {
  const auto sys = with_rates(0.5, 1.0, 0.1, 0.1);
  const auto short_run = f2_time_domain(sys, 20.0, 1e-12);
  CHECK(short_run.horizon == 20.0);
  CHECK(short_run.error_estimate > std::abs(short_run.value - f2_closed(sys)));
  const auto full = f2_time_domain(sys, 0.0, 1e-12);
  CHECK(full.horizon > 200.0);
}

TEST_CASE("spectral quadrature") {
  const auto sym = with_rates(0.0, 1.0, 0.1, 0.1);
  const auto grid = recommended_spectral_grid(sym);
  const auto s = f2_spectral(sym, grid.e_span, grid.n_points);
  CHECK(std::abs(s.value - 2.0 / 4.01) < 1e-6);
  CHECK(s.value == doctest::Approx(0.498753).epsilon(1e-6));
  CHECK(s.truncation < 1e-7);

  CHECK(f2_spectral(with_rates(0.4, 0.0, 0.1, 0.3), 10.0, 2000).value == 0.0);
  CHECK_THROWS_AS(f2_spectral(sym, 10.0, 999), DomainError);
  CHECK_THROWS_AS(f2_spectral(sym, -1.0, 5000), DomainError);
  CHECK_THROWS_AS(f2_spectral(with_rates(0.0, 1.0, 0.0, 0.0), 10.0, 5000), DomainError);

  // A narrow window reports a truncation bound at least as large as its error.
  const auto narrow = f2_spectral(sym, 5.0, 200001);
  CHECK(std::abs(narrow.value - f2_closed(sym)) <= narrow.truncation);
}

TEST_CASE("three routes agree, including a closed channel") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> rate(0.02, 0.5);
  std::uniform_real_distribution<double> detuning(0.0, 2.0);
  for (int i = 0; i < 15; ++i) {
    const auto sys = with_rates(detuning(rng), 1.0, rate(rng), rate(rng));
    const auto grid = recommended_spectral_grid(sys);
    const auto s = f2_spectral(sys, grid.e_span, grid.n_points);
    CHECK(std::abs(s.value - f2_closed(sys)) < std::max(1e-6, s.truncation));
  }

  // gamma1 = 0: no closed form, the two quadratures must still agree.
  const auto one_sided = with_rates(0.0, 1.0, 0.0, 0.4);
  const auto t = f2_time_domain(one_sided);
  const auto grid = recommended_spectral_grid(one_sided);
  const auto s = f2_spectral(one_sided, grid.e_span, grid.n_points);
  CHECK(std::abs(t.value - s.value) < 1e-6);
  CHECK(t.value == doctest::Approx(1.0).epsilon(1e-6));  // the only open channel
}

TEST_CASE("network branching") {
  SUBCASE("two-site reduction") {
    const auto sys = with_rates(0.5, 1.0, 0.1, 0.1);
    const auto r = network_branching(SiteNetwork::from_two_site(sys), localized_state(2));
    REQUIRE(r.fractions.size() == 2);
    CHECK(std::abs(r.fractions[1] - f2_closed(sys)) < 1e-6);
    CHECK(std::abs(r.fractions[0] + r.fractions[1] + r.survival - 1.0) < 1e-6);
  }
  SUBCASE("no decay") {
    Eigen::MatrixXd c(2, 2);
    c << 0.0, 1.0, 1.0, 0.0;
    const auto r = network_branching(SiteNetwork({0, 0}, {0, 0}, c), localized_state(2));
    CHECK(r.fractions[0] == 0.0);
    CHECK(r.fractions[1] == 0.0);
    CHECK(r.survival == 1.0);
  }
  SUBCASE("single open channel at the end of a chain") {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 3);
    c(0, 1) = c(1, 0) = 1.0;
    c(1, 2) = c(2, 1) = 1.0;
    const SiteNetwork chain({0, 0, 0}, {0, 0, 0.5}, c);
    const auto r = network_branching(chain, localized_state(3));
    CHECK(r.fractions[0] == 0.0);
    CHECK(r.fractions[2] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.survival < 1e-6);
    CHECK(std::abs(r.fractions[2] + r.survival - 1.0) < 1e-6);

    const double needed = recommended_horizon(chain, 1e-9);
    CHECK_THROWS_AS(network_branching(chain, localized_state(3), 0.5 * needed, 1e-9),
                    AccuracyError);
  }
  SUBCASE("random networks obey the sum rule") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> sites(2, 8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      const int m = sites(rng);
      std::vector<double> e(static_cast<std::size_t>(m));
      std::vector<double> g(static_cast<std::size_t>(m));
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        e[static_cast<std::size_t>(i)] = 2.0 * u(rng) - 1.0;
        g[static_cast<std::size_t>(i)] = 0.05 + 0.5 * u(rng);
        for (int j = i + 1; j < m; ++j) c(i, j) = c(j, i) = u(rng);
      }
      const auto r = network_branching(SiteNetwork(e, g, c), localized_state(static_cast<std::size_t>(m)));
      double total = r.survival;
      for (double f : r.fractions) {
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        total += f;
      }
      CHECK(std::abs(total - 1.0) < 1e-6);
    }
  }
}
