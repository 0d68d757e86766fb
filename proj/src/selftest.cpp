#include "coboson/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "coboson/branching.hpp"
#include "coboson/coboson_stats.hpp"
#include "coboson/dynamics.hpp"
#include "coboson/errors.hpp"

namespace coboson {

namespace {

std::string worst_text(double worst, double limit) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "worst %.3e (limit %.1e)", worst, limit);
  return buf;
}

SelftestCheck bounded(std::string name, double worst, double limit) {
  return {std::move(name), worst < limit, worst_text(worst, limit)};
}

SchmidtSpectrum random_spectrum(std::mt19937_64& rng, int max_modes) {
  std::uniform_int_distribution<int> modes(1, max_modes);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(modes(rng)));
  for (auto& x : w) x = weight(rng);
  w[0] += 1e-3;
  return SchmidtSpectrum(w);
}

SelftestCheck chi_oracle(std::mt19937_64& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_spectrum(rng, 12);
    for (int n = 0; n <= 6; ++n) {
      const double exact = brute_force_chi(s, n);
      const double got = chi(s, n);
      const double err = exact == 0.0 ? std::abs(got) : std::abs(got - exact) / exact;
      worst = std::max(worst, err);
    }
  }
  return bounded("chi matches subset enumeration", worst, 1e-12);
}

SelftestCheck ratio_bounds(std::mt19937_64& rng) {
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = random_spectrum(rng, 40);
    const int top = static_cast<int>(std::min<std::size_t>(s.occupied_modes(), 12));
    const ChiTable table(s, static_cast<std::size_t>(top) + 1);
    double previous = 1.0;
    for (int n = 1; n <= top; ++n) {
      const double r = table.ratio(static_cast<std::size_t>(n) + 1);
      const auto b = purity_bounds(s, n);
      if (r < b.lower - 1e-12 || r > b.upper + 1e-12 || r > previous + 1e-12) ++violations;
      previous = r;
    }
  }
  return {"purity bounds and ratio monotonicity", violations == 0,
          std::to_string(violations) + " violations"};
}

SelftestCheck propagator_oracle(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::uniform_real_distribution<double> w(-2.0, 2.0);
  const std::vector<cplx> initial{1.0, 0.0};
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const TwoSiteSystem sys(0.0, w(rng), u(rng), u(rng), u(rng));
    if (std::abs(sys.omega()) < 1e-3) continue;
    const auto exact = propagate(sys, initial, 10.0, 0.1);
    const auto rk4 = propagate(SiteNetwork::from_two_site(sys), initial, 10.0, 0.1);
    for (std::size_t k = 0; k < exact.size(); ++k) {
      worst = std::max(worst, std::abs(exact.population(k, 1) - p12_closed(sys, exact.times[k])));
      worst = std::max(worst, std::abs(rk4.population(k, 1) - p12_closed(sys, exact.times[k])));
    }
  }
  return bounded("closed-form transfer vs propagators", worst, 1e-8);
}

SelftestCheck exceptional_point() {
  const auto ep = find_exceptional_point(0.0, 1.0, 0.0);
  const bool located = ep.critical_coupling && std::abs(*ep.critical_coupling - 0.25) < 1e-12;
  const double c = eigenvector_coalescence(0.25, 0.5, 0.0);
  return {"exceptional point location and coalescence", located && c > 0.999,
          "coalescence " + worst_text(1.0 - c, 1e-3)};
}

SelftestCheck branching_routes(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rate(0.05, 0.5);
  std::uniform_real_distribution<double> w(0.0, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const TwoSiteSystem sys(0.0, w(rng), 1.0, rate(rng), rate(rng));
    const double closed = f2_closed(sys);
    const auto grid = recommended_spectral_grid(sys);
    const auto spectral = f2_spectral(sys, grid.e_span, grid.n_points);
    worst = std::max(worst, std::abs(closed - f2_time_domain(sys).value));
    worst = std::max(worst, std::abs(closed - spectral.value) - spectral.truncation);
  }
  return bounded("branching fraction: closed, time and spectral routes", worst, 1e-6);
}

SelftestCheck network_sum_rule(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> sites(2, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
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
    for (double f : r.fractions) total += f;
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return bounded("network branching sum rule", worst, 1e-6);
}

template <typename Check>
SelftestCheck guarded(const char* name, Check&& check) {
  try {
    return check();
  } catch (const std::exception& e) {
    return {name, false, std::string("threw: ") + e.what()};
  }
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SelftestCheck> checks;
  checks.push_back(guarded("chi oracle", [&] { return chi_oracle(rng); }));
  checks.push_back(guarded("ratio bounds", [&] { return ratio_bounds(rng); }));
  checks.push_back(guarded("propagators", [&] { return propagator_oracle(rng); }));
  checks.push_back(guarded("exceptional point", [] { return exceptional_point(); }));
  checks.push_back(guarded("branching routes", [&] { return branching_routes(rng); }));
  checks.push_back(guarded("network sum rule", [&] { return network_sum_rule(rng); }));
  return checks;
}

}  // namespace coboson
