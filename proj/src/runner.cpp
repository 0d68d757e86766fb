#include "coboson/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <string>

#include "coboson/branching.hpp"
#include "coboson/coboson_stats.hpp"
#include "coboson/dynamics.hpp"
#include "coboson/errors.hpp"
#include "parallel.hpp"

namespace coboson {

namespace {

using Row = std::vector<Cell>;

// One point of the Cartesian product of the sweep axes.
struct GridCell {
  std::vector<double> values;  // one per axis
};

std::vector<GridCell> grid_cells(const Scenario& s) {
  std::vector<GridCell> cells{GridCell{}};
  for (const auto& axis : s.sweep) {
    std::vector<GridCell> next;
    next.reserve(cells.size() * axis.values.size());
    for (const auto& cell : cells) {
      for (double x : axis.values) {
        GridCell c = cell;
        c.values.push_back(x);
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

double cell_param(const Scenario& s, const GridCell& cell, const std::string& key) {
  for (std::size_t i = 0; i < s.sweep.size(); ++i)
    if (s.sweep[i].name == key) return cell.values[i];
  return s.number(key);
}

// Runs one task per cell and concatenates their rows in cell order.
template <typename CellRows>
std::vector<Row> sweep_rows(const std::vector<GridCell>& cells, unsigned threads,
                            CellRows&& rows_for) {
  std::vector<std::vector<Row>> parts(cells.size());
  detail::parallel_for(cells.size(), threads,
                       [&](std::size_t i) { parts[i] = rows_for(cells[i]); });
  std::vector<Row> rows;
  for (auto& part : parts)
    for (auto& row : part) rows.push_back(std::move(row));
  return rows;
}

SchmidtSpectrum spectrum_of(const Scenario& s) {
  if (s.params.contains("modes")) return SchmidtSpectrum::uniform(static_cast<std::size_t>(s.integer("modes")));
  if (s.params.contains("weights")) return SchmidtSpectrum(s.params["weights"].get<std::vector<double>>());
  return SchmidtSpectrum::load(s.text("spectrum_file"));
}

void run_coboson(const Scenario& s, unsigned threads, RunResult& out) {
  const int n_min = static_cast<int>(s.integer("n_min"));
  const int n_max = static_cast<int>(s.integer("n_max"));
  if (s.text("model") == "qdot") {
    out.table.columns = {"n", "r", "g2", "delta"};
    out.table.rows = sweep_rows(grid_cells(s), threads, [&](const GridCell& cell) {
      const QuantumDotGeometry geom(cell_param(s, cell, "r"));
      std::vector<Row> rows;
      for (int n = n_min; n <= n_max; ++n)
        rows.push_back({static_cast<long long>(n), geom.bohr_ratio(), qdot_g2_zero(n, geom),
                        bosonic_deviation(n, geom)});
      return rows;
    });
    out.metadata["error_estimates"] = {{"method", "closed form"}};
    return;
  }
  const SchmidtSpectrum spectrum = spectrum_of(s);
  if (static_cast<std::size_t>(n_max) > spectrum.occupied_modes())
    throw DomainError("n_max <= " + std::to_string(spectrum.occupied_modes()) +
                      " (number of occupied modes)");
  const ChiTable table(spectrum, static_cast<std::size_t>(n_max) + 1);
  out.table.columns = {"n", "chi_ratio", "lower", "upper", "fragment_norm"};
  for (int n = n_min; n <= n_max; ++n) {
    const auto bounds = purity_bounds(spectrum, n);
    out.table.rows.push_back({static_cast<long long>(n),
                              table.ratio(static_cast<std::size_t>(n) + 1), bounds.lower,
                              bounds.upper, std::clamp(fragment_norm(table, n), 0.0, 1.0)});
  }
  out.metadata["modes"] = spectrum.mode_count();
  out.metadata["purity"] = purity(spectrum);
  out.metadata["error_estimates"] = {
      {"method", table.log_scale() ? "prefix recurrence, log scale" : "prefix recurrence"}};
}

void run_tunnel(const Scenario& s, unsigned threads, RunResult& out) {
  for (const auto& axis : s.sweep) out.table.columns.push_back(axis.name);
  for (const char* c : {"t", "p11", "p12", "delta_p", "norm"}) out.table.columns.emplace_back(c);
  const double unit = s.number("time_unit");
  const double t_max = s.number("t_max");
  const double dt = s.number("dt");
  const std::vector<cplx> initial{1.0, 0.0};
  out.table.rows = sweep_rows(grid_cells(s), threads, [&](const GridCell& cell) {
    const TwoSiteSystem sys(0.0, cell_param(s, cell, "omega0"), cell_param(s, cell, "v"),
                            cell_param(s, cell, "gamma1"), cell_param(s, cell, "gamma2"));
    const Trajectory traj = propagate(sys, initial, t_max * unit, dt * unit);
    std::vector<Row> rows;
    rows.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
      Row row(cell.values.begin(), cell.values.end());
      const double p11 = traj.population(k, 0);
      const double p12 = traj.population(k, 1);
      row.insert(row.end(), {static_cast<double>(k) * dt, p11, p12, p11 - p12, traj.norm[k]});
      rows.push_back(std::move(row));
    }
    return rows;
  });
  out.metadata["time_unit"] = unit;
  out.metadata["error_estimates"] = {{"method", "exact two-site propagator"}};
}

void run_ep_scan(const Scenario& s, RunResult& out) {
  out.table.columns = {"v", "gamma_diff", "abs_omega_sq", "regime", "coalescence"};
  const auto cells = ep_scan(s.axis("v")->values, s.axis("gamma_diff")->values, s.number("omega0"));
  for (const auto& c : cells)
    out.table.rows.push_back(
        {c.coupling, c.gamma_diff, c.abs_omega_sq, std::string(regime_name(c.regime)), c.coalescence});
  out.metadata["regime_extension"] = s.number("omega0") != 0.0;
}

struct BranchingCell {
  Row row;
  double time_error = 0.0;
  double truncation = 0.0;
  double closed_vs_time = 0.0;
  double closed_vs_spectral = 0.0;
};

void run_branching(const Scenario& s, unsigned threads, RunResult& out) {
  out.table.columns = {"delta1", "delta2", "omega0", "v", "f2_closed", "f2_time", "f2_spectral"};
  const auto cells = grid_cells(s);
  std::vector<BranchingCell> results(cells.size());
  const double target = s.number("spectral_target");
  const double time_tol = s.number("time_tol");
  detail::parallel_for(cells.size(), threads, [&](std::size_t i) {
    const double d1 = cell_param(s, cells[i], "delta1");
    const double d2 = cell_param(s, cells[i], "delta2");
    const double w0 = cell_param(s, cells[i], "omega0");
    const double v = cell_param(s, cells[i], "v");
    const TwoSiteSystem sys = TwoSiteSystem::from_deviations(
        0.0, w0, v, {s.number("scale1"), d1}, {s.number("scale2"), d2});
    const double closed = f2_closed(sys);
    const auto time = f2_time_domain(sys, 0.0, time_tol);
    const auto grid = recommended_spectral_grid(sys, target);
    const auto spectral = f2_spectral(sys, grid.e_span, grid.n_points);
    results[i] = {Row{d1, d2, w0, v, closed, time.value, spectral.value}, time.error_estimate,
                  spectral.truncation, std::abs(closed - time.value),
                  std::abs(closed - spectral.value)};
  });
  double time_error = 0, truncation = 0, dt = 0, ds = 0;
  for (auto& r : results) {
    out.table.rows.push_back(std::move(r.row));
    time_error = std::max(time_error, r.time_error);
    truncation = std::max(truncation, r.truncation);
    dt = std::max(dt, r.closed_vs_time);
    ds = std::max(ds, r.closed_vs_spectral);
  }
  out.metadata["error_estimates"] = {{"max_time_domain_error", time_error},
                                     {"max_spectral_truncation", truncation},
                                     {"max_closed_vs_time", dt},
                                     {"max_closed_vs_spectral", ds}};
}

void run_network(const Scenario& s, RunResult& out) {
  const auto energies = s.params["energies"].get<std::vector<double>>();
  const auto decays = s.params["decays"].get<std::vector<double>>();
  const auto m = static_cast<Eigen::Index>(energies.size());
  Eigen::MatrixXd c(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      c(i, j) = s.params["couplings"][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  const SiteNetwork net(energies, decays, c);
  const auto initial = localized_state(energies.size(), static_cast<std::size_t>(s.integer("initial_site") - 1));

  const Trajectory traj = propagate(net, initial, s.number("t_max"), s.number("dt"));
  out.table.columns = {"t"};
  for (Eigen::Index k = 1; k <= m; ++k) out.table.columns.push_back("p_" + std::to_string(k));
  out.table.columns.emplace_back("norm");
  for (std::size_t k = 0; k < traj.size(); ++k) {
    Row row{traj.times[k]};
    for (std::size_t site = 0; site < traj.site_count; ++site) row.emplace_back(traj.population(k, site));
    row.emplace_back(traj.norm[k]);
    out.table.rows.push_back(std::move(row));
  }

  const BranchingResult br = network_branching(net, initial, s.number("horizon"), s.number("tol"));
  Table branching;
  branching.columns = {"site", "fraction"};
  for (std::size_t k = 0; k < br.fractions.size(); ++k)
    branching.rows.push_back({static_cast<long long>(k + 1), br.fractions[k]});
  branching.rows.push_back({std::string("survival"), br.survival});
  out.branching = std::move(branching);

  if (!s.text("description").empty()) out.metadata["description"] = s.text("description");
  out.metadata["branching_horizon"] = br.horizon;
  out.metadata["error_estimates"] = {{"trajectory", traj.error_estimate},
                                     {"branching", br.error_estimate}};
}

}  // namespace

unsigned resolve_threads(std::optional<unsigned> requested) {
  if (requested) return std::max(1u, *requested);
  if (const char* env = std::getenv("COBOSON_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1)
      throw ValidationError("COBOSON_THREADS >= 1 (got \"" + std::string(env) + "\")");
    return static_cast<unsigned>(n);
  }
  return 1;
}

RunResult run_scenario(const Scenario& scenario, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  RunResult out;
  out.scenario = scenario;
  out.metadata["tool_version"] = kToolVersion;
  switch (scenario.kind) {
    case ScenarioKind::coboson_sweep: run_coboson(scenario, threads, out); break;
    case ScenarioKind::tunnel: run_tunnel(scenario, threads, out); break;
    case ScenarioKind::ep_scan: run_ep_scan(scenario, out); break;
    case ScenarioKind::branching_sweep: run_branching(scenario, threads, out); break;
    case ScenarioKind::network: run_network(scenario, out); break;
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  out.metadata["runtime_seconds"] = elapsed.count();
  return out;
}

}  // namespace coboson
