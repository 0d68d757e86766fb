#include "coboson/coboson.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "coboson/branching.hpp"
#include "coboson/coboson_stats.hpp"
#include "coboson/dynamics.hpp"
#include "coboson/errors.hpp"
#include "coboson/runner.hpp"
#include "coboson/scenario.hpp"
#include "coboson/selftest.hpp"

struct cb_spectrum {
  coboson::SchmidtSpectrum value;
};

struct cb_trajectory {
  coboson::Trajectory value;
};

struct cb_network {
  coboson::SiteNetwork value;
};

struct cb_scenario {
  coboson::Scenario value;
  std::string kind;
};

struct cb_result {
  coboson::RunResult value;
};

namespace {

thread_local std::string last_error;

cb_status fail(cb_status status, const std::string& message) {
  last_error = message;
  return status;
}

cb_status status_of(coboson::ErrorKind kind) {
  switch (kind) {
    case coboson::ErrorKind::parse: return CB_PARSE_ERROR;
    case coboson::ErrorKind::validation: return CB_VALIDATION_ERROR;
    case coboson::ErrorKind::domain: return CB_DOMAIN_ERROR;
    case coboson::ErrorKind::accuracy: return CB_ACCURACY_ERROR;
    case coboson::ErrorKind::io: return CB_IO_ERROR;
  }
  return CB_INTERNAL_ERROR;
}

template <typename Body>
cb_status guard(Body&& body) {
  try {
    body();
    return CB_OK;
  } catch (const coboson::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(CB_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(CB_INTERNAL_ERROR, e.what());
  }
}

template <typename... Ptr>
bool any_null(const Ptr*... p) {
  return ((p == nullptr) || ...);
}

cb_status null_argument() { return fail(CB_INVALID_ARGUMENT, "null argument"); }

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

coboson::TwoSiteSystem system_of(const cb_two_site& s) {
  return {s.omega1, s.omega2, s.coupling, s.gamma1, s.gamma2};
}

template <typename F>
cb_status spectrum_value(const cb_spectrum* s, double* out, F&& f) {
  if (any_null(s, out)) return null_argument();
  return guard([&] { *out = f(s->value); });
}

template <typename F>
cb_status system_value(const cb_two_site* sys, double* out, F&& f) {
  if (any_null(sys, out)) return null_argument();
  return guard([&] { *out = f(system_of(*sys)); });
}

}  // namespace

extern "C" {

const char* cb_version(void) { return coboson::kToolVersion; }

const char* cb_last_error(void) { return last_error.c_str(); }

const char* cb_status_name(cb_status status) {
  switch (status) {
    case CB_OK: return "ok";
    case CB_PARSE_ERROR: return "parse_error";
    case CB_VALIDATION_ERROR: return "validation_error";
    case CB_DOMAIN_ERROR: return "domain_error";
    case CB_ACCURACY_ERROR: return "accuracy_error";
    case CB_IO_ERROR: return "io_error";
    case CB_INVALID_ARGUMENT: return "invalid_argument";
    case CB_INTERNAL_ERROR: return "internal_error";
  }
  return "unknown";
}

void cb_string_free(char* text) { std::free(text); }

cb_status cb_resolve_threads(int requested, unsigned* out) {
  if (out == nullptr) return null_argument();
  return guard([&] {
    *out = coboson::resolve_threads(requested > 0 ? std::optional<unsigned>(static_cast<unsigned>(requested))
                                                  : std::nullopt);
  });
}

// ---- spectra ---------------------------------------------------------------

cb_status cb_spectrum_create(const double* weights, size_t count, cb_spectrum** out) {
  if (out == nullptr || (weights == nullptr && count > 0)) return null_argument();
  return guard([&] {
    *out = new cb_spectrum{coboson::SchmidtSpectrum(std::vector<double>(weights, weights + count))};
  });
}

cb_status cb_spectrum_uniform(size_t modes, cb_spectrum** out) {
  if (out == nullptr) return null_argument();
  return guard([&] { *out = new cb_spectrum{coboson::SchmidtSpectrum::uniform(modes)}; });
}

cb_status cb_spectrum_load(const char* path, cb_spectrum** out) {
  if (any_null(path, out)) return null_argument();
  return guard([&] { *out = new cb_spectrum{coboson::SchmidtSpectrum::load(path)}; });
}

void cb_spectrum_free(cb_spectrum* spectrum) { delete spectrum; }

cb_status cb_spectrum_mode_count(const cb_spectrum* s, size_t* out) {
  if (any_null(s, out)) return null_argument();
  *out = s->value.mode_count();
  return CB_OK;
}

cb_status cb_spectrum_coefficients(const cb_spectrum* s, double* out, size_t capacity) {
  if (any_null(s, out)) return null_argument();
  const auto c = s->value.coefficients();
  if (capacity < c.size())
    return fail(CB_INVALID_ARGUMENT, "capacity " + std::to_string(capacity) + " < " +
                                         std::to_string(c.size()) + " modes");
  std::copy(c.begin(), c.end(), out);
  return CB_OK;
}

cb_status cb_purity(const cb_spectrum* s, double* out) {
  return spectrum_value(s, out, [](const auto& sp) { return coboson::purity(sp); });
}

cb_status cb_schmidt_number(const cb_spectrum* s, double* out) {
  return spectrum_value(s, out, [](const auto& sp) { return coboson::schmidt_number(sp); });
}

cb_status cb_chi(const cb_spectrum* s, int n, double* out) {
  return spectrum_value(s, out, [n](const auto& sp) { return coboson::chi(sp, n); });
}

cb_status cb_chi_ratio(const cb_spectrum* s, int n, double* out) {
  return spectrum_value(s, out, [n](const auto& sp) { return coboson::chi_ratio(sp, n); });
}

cb_status cb_purity_bounds(const cb_spectrum* s, int n, double* lower, double* upper) {
  if (any_null(s, lower, upper)) return null_argument();
  return guard([&] {
    const auto b = coboson::purity_bounds(s->value, n);
    *lower = b.lower;
    *upper = b.upper;
  });
}

cb_status cb_fragment_norm(const cb_spectrum* s, int n, double* out) {
  return spectrum_value(s, out, [n](const auto& sp) { return coboson::fragment_norm_reported(sp, n); });
}

cb_status cb_ideality_alpha(const cb_spectrum* s, int n, double* out) {
  return spectrum_value(s, out, [n](const auto& sp) { return coboson::ideality_alpha(sp, n); });
}

cb_status cb_qdot_g2_zero(int n, double r, double* out) {
  if (out == nullptr) return null_argument();
  return guard([&] { *out = coboson::qdot_g2_zero(n, coboson::QuantumDotGeometry(r)); });
}

cb_status cb_bosonic_deviation(int n, double r, double* out) {
  if (out == nullptr) return null_argument();
  return guard([&] { *out = coboson::bosonic_deviation(n, coboson::QuantumDotGeometry(r)); });
}

// ---- two-site dynamics -----------------------------------------------------

cb_status cb_p12_closed(const cb_two_site* sys, double t, double* out) {
  return system_value(sys, out, [t](const auto& s) { return coboson::p12_closed(s, t); });
}

cb_status cb_ep_limit(const cb_two_site* sys, double t, double* out) {
  return system_value(sys, out, [t](const auto& s) { return coboson::ep_limit(s, t); });
}

cb_status cb_classify_regime(const cb_two_site* sys, cb_regime* regime, int* extension) {
  if (any_null(sys, regime, extension)) return null_argument();
  return guard([&] {
    const auto c = coboson::classify_regime(system_of(*sys));
    *regime = static_cast<cb_regime>(static_cast<int>(c.regime));
    *extension = c.extension ? 1 : 0;
  });
}

cb_status cb_find_exceptional_point(double gamma1, double gamma2, double omega0, int* found,
                                    double* coupling) {
  if (any_null(found, coupling)) return null_argument();
  return guard([&] {
    const auto ep = coboson::find_exceptional_point(gamma1, gamma2, omega0);
    *found = ep.critical_coupling ? 1 : 0;
    if (ep.critical_coupling) *coupling = *ep.critical_coupling;
  });
}

cb_status cb_eigenvector_coalescence(double coupling, double gamma_diff, double omega0, double* out) {
  if (out == nullptr) return null_argument();
  return guard([&] { *out = coboson::eigenvector_coalescence(coupling, gamma_diff, omega0); });
}

cb_status cb_two_site_propagate(const cb_two_site* sys, double t_max, double dt, cb_trajectory** out) {
  if (any_null(sys, out)) return null_argument();
  return guard([&] {
    const std::vector<coboson::cplx> initial{1.0, 0.0};
    *out = new cb_trajectory{coboson::propagate(system_of(*sys), initial, t_max, dt)};
  });
}

void cb_trajectory_free(cb_trajectory* traj) { delete traj; }

cb_status cb_trajectory_shape(const cb_trajectory* traj, size_t* steps, size_t* sites) {
  if (any_null(traj, steps, sites)) return null_argument();
  *steps = traj->value.size();
  *sites = traj->value.site_count;
  return CB_OK;
}

cb_status cb_trajectory_time(const cb_trajectory* traj, size_t step, double* out) {
  if (any_null(traj, out)) return null_argument();
  if (step >= traj->value.size()) return fail(CB_DOMAIN_ERROR, "step out of range");
  *out = traj->value.times[step];
  return CB_OK;
}

cb_status cb_trajectory_population(const cb_trajectory* traj, size_t step, size_t site, double* out) {
  if (any_null(traj, out)) return null_argument();
  if (step >= traj->value.size() || site >= traj->value.site_count)
    return fail(CB_DOMAIN_ERROR, "step or site out of range");
  *out = traj->value.population(step, site);
  return CB_OK;
}

cb_status cb_trajectory_norm(const cb_trajectory* traj, size_t step, double* out) {
  if (any_null(traj, out)) return null_argument();
  if (step >= traj->value.size()) return fail(CB_DOMAIN_ERROR, "step out of range");
  *out = traj->value.norm[step];
  return CB_OK;
}

cb_status cb_trajectory_error_estimate(const cb_trajectory* traj, double* out) {
  if (any_null(traj, out)) return null_argument();
  *out = traj->value.error_estimate;
  return CB_OK;
}

// ---- branching -------------------------------------------------------------

cb_status cb_f2_closed(const cb_two_site* sys, double* out) {
  return system_value(sys, out, [](const auto& s) { return coboson::f2_closed(s); });
}

cb_status cb_f2_time_domain(const cb_two_site* sys, double horizon, double tol, double* value,
                            double* error_estimate) {
  if (any_null(sys, value, error_estimate)) return null_argument();
  return guard([&] {
    const auto q = coboson::f2_time_domain(system_of(*sys), horizon, tol);
    *value = q.value;
    *error_estimate = q.error_estimate;
  });
}

cb_status cb_f2_spectral(const cb_two_site* sys, double e_span, long n_points, double* value,
                         double* truncation) {
  if (any_null(sys, value, truncation)) return null_argument();
  return guard([&] {
    const auto s = coboson::f2_spectral(system_of(*sys), e_span, n_points);
    *value = s.value;
    *truncation = s.truncation;
  });
}

cb_status cb_recommended_spectral_grid(const cb_two_site* sys, double target, double* e_span,
                                       long* n_points) {
  if (any_null(sys, e_span, n_points)) return null_argument();
  return guard([&] {
    const auto g = coboson::recommended_spectral_grid(system_of(*sys), target);
    *e_span = g.e_span;
    *n_points = g.n_points;
  });
}

// ---- networks --------------------------------------------------------------

cb_status cb_network_create(size_t sites, const double* energies, const double* decays,
                            const double* couplings, cb_network** out) {
  if (out == nullptr || (sites > 0 && any_null(energies, decays, couplings))) return null_argument();
  return guard([&] {
    const auto m = static_cast<Eigen::Index>(sites);
    Eigen::MatrixXd c(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) c(i, j) = couplings[i * m + j];
    *out = new cb_network{coboson::SiteNetwork(std::vector<double>(energies, energies + sites),
                                               std::vector<double>(decays, decays + sites), c)};
  });
}

void cb_network_free(cb_network* net) { delete net; }

cb_status cb_network_propagate(const cb_network* net, size_t initial_site, double t_max, double dt,
                               cb_trajectory** out) {
  if (any_null(net, out)) return null_argument();
  return guard([&] {
    const auto initial = coboson::localized_state(net->value.site_count(), initial_site);
    *out = new cb_trajectory{coboson::propagate(net->value, initial, t_max, dt)};
  });
}

cb_status cb_network_branching(const cb_network* net, size_t initial_site, double horizon, double tol,
                               double* fractions, double* survival) {
  if (any_null(net, fractions, survival)) return null_argument();
  return guard([&] {
    const auto initial = coboson::localized_state(net->value.site_count(), initial_site);
    const auto r = coboson::network_branching(net->value, initial, horizon, tol);
    std::copy(r.fractions.begin(), r.fractions.end(), fractions);
    *survival = r.survival;
  });
}

// ---- scenarios -------------------------------------------------------------

namespace {

cb_scenario* wrap(coboson::Scenario s) {
  auto* out = new cb_scenario{std::move(s), {}};
  out->kind = coboson::scenario_kind_name(out->value.kind);
  return out;
}

}  // namespace

cb_status cb_scenario_parse(const char* document, cb_scenario** out) {
  if (any_null(document, out)) return null_argument();
  return guard([&] { *out = wrap(coboson::load_scenario(document)); });
}

cb_status cb_scenario_load(const char* path, cb_scenario** out) {
  if (any_null(path, out)) return null_argument();
  return guard([&] { *out = wrap(coboson::load_scenario_file(path)); });
}

cb_status cb_scenario_preset(const char* name, cb_scenario** out) {
  if (any_null(name, out)) return null_argument();
  return guard([&] { *out = wrap(coboson::preset(name)); });
}

void cb_scenario_free(cb_scenario* scenario) { delete scenario; }

cb_status cb_scenario_serialize(const cb_scenario* scenario, char** out) {
  if (any_null(scenario, out)) return null_argument();
  return guard([&] { *out = duplicate(coboson::serialize_scenario(scenario->value)); });
}

cb_status cb_scenario_kind(const cb_scenario* scenario, const char** out) {
  if (any_null(scenario, out)) return null_argument();
  *out = scenario->kind.c_str();
  return CB_OK;
}

cb_status cb_scenario_output_path(const cb_scenario* scenario, const char** out) {
  if (any_null(scenario, out)) return null_argument();
  *out = scenario->value.output.path.c_str();
  return CB_OK;
}

cb_status cb_scenario_output_format(const cb_scenario* scenario, const char** out) {
  if (any_null(scenario, out)) return null_argument();
  *out = scenario->value.output.format.c_str();
  return CB_OK;
}

cb_status cb_scenario_run(const cb_scenario* scenario, unsigned threads, cb_result** out) {
  if (any_null(scenario, out)) return null_argument();
  return guard([&] {
    const unsigned n = threads > 0 ? threads : coboson::resolve_threads(std::nullopt);
    *out = new cb_result{coboson::run_scenario(scenario->value, n)};
  });
}

void cb_result_free(cb_result* result) { delete result; }

cb_status cb_result_csv(const cb_result* result, char** out) {
  if (any_null(result, out)) return null_argument();
  return guard([&] { *out = duplicate(coboson::to_csv(result->value)); });
}

cb_status cb_result_table_csv(const cb_result* result, char** out) {
  if (any_null(result, out)) return null_argument();
  return guard([&] { *out = duplicate(coboson::to_csv(result->value.table)); });
}

cb_status cb_result_branching_csv(const cb_result* result, char** out) {
  if (any_null(result, out)) return null_argument();
  return guard([&] {
    *out = result->value.branching ? duplicate(coboson::to_csv(*result->value.branching)) : nullptr;
  });
}

cb_status cb_result_json(const cb_result* result, char** out) {
  if (any_null(result, out)) return null_argument();
  return guard([&] { *out = duplicate(coboson::to_json(result->value)); });
}

cb_status cb_result_row_count(const cb_result* result, size_t* out) {
  if (any_null(result, out)) return null_argument();
  *out = result->value.table.rows.size();
  return CB_OK;
}

const char* cb_preset_name(size_t index) {
  const auto& names = coboson::preset_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

cb_status cb_selftest(uint64_t seed, int* all_passed, char** report) {
  if (any_null(all_passed, report)) return null_argument();
  return guard([&] {
    std::string text;
    bool ok = true;
    for (const auto& check : coboson::run_selftest(seed)) {
      ok = ok && check.passed;
      text += std::string(check.passed ? "PASS " : "FAIL ") + check.name + ": " + check.detail + "\n";
    }
    *all_passed = ok ? 1 : 0;
    *report = duplicate(text);
  });
}

}  // extern "C"
