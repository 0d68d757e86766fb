// Command-line front end. Every subcommand builds a scenario document and
// runs it through the C interface.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coboson/coboson.h"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kInvalid = 3, kAccuracy = 4 };

struct Failure {
  cb_status status;
  std::string message;
};

int exit_code(cb_status status) {
  switch (status) {
    case CB_OK: return kOk;
    case CB_PARSE_ERROR:
    case CB_IO_ERROR: return kUsage;
    case CB_VALIDATION_ERROR:
    case CB_DOMAIN_ERROR: return kInvalid;
    case CB_ACCURACY_ERROR: return kAccuracy;
    case CB_INVALID_ARGUMENT:
    case CB_INTERNAL_ERROR: break;
  }
  return kInternal;
}

void check(cb_status status) {
  if (status != CB_OK) throw Failure{status, cb_last_error()};
}

struct FreeString {
  void operator()(char* s) const { cb_string_free(s); }
};
using OwnedString = std::unique_ptr<char, FreeString>;

struct FreeScenario {
  void operator()(cb_scenario* s) const { cb_scenario_free(s); }
};
struct FreeResult {
  void operator()(cb_result* r) const { cb_result_free(r); }
};

std::string take(char* raw) {
  OwnedString owned(raw);
  return raw == nullptr ? std::string() : std::string(raw);
}

struct Options {
  std::string out;
  std::string format;
  std::string branching_out;
  int threads = 0;
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fflush(stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Failure{CB_IO_ERROR, "cannot write " + path};
}

void run_and_emit(cb_scenario* raw, const Options& opt) {
  std::unique_ptr<cb_scenario, FreeScenario> scenario(raw);
  const char* scenario_path = nullptr;
  const char* scenario_format = nullptr;
  check(cb_scenario_output_path(scenario.get(), &scenario_path));
  check(cb_scenario_output_format(scenario.get(), &scenario_format));
  const std::string path = opt.out.empty() ? scenario_path : opt.out;
  const std::string format = opt.format.empty() ? scenario_format : opt.format;

  cb_result* raw_result = nullptr;
  check(cb_scenario_run(scenario.get(), static_cast<unsigned>(opt.threads), &raw_result));
  std::unique_ptr<cb_result, FreeResult> result(raw_result);

  char* text = nullptr;
  if (format == "json") {
    check(cb_result_json(result.get(), &text));
    write_text(path, take(text));
    return;
  }
  if (!opt.branching_out.empty()) {
    check(cb_result_table_csv(result.get(), &text));
    write_text(path, take(text));
    check(cb_result_branching_csv(result.get(), &text));
    if (text != nullptr) write_text(opt.branching_out, take(text));
    return;
  }
  check(cb_result_csv(result.get(), &text));
  write_text(path, take(text));
}

void run_document(const Json& doc, const Options& opt) {
  cb_scenario* scenario = nullptr;
  check(cb_scenario_parse(doc.dump().c_str(), &scenario));
  run_and_emit(scenario, opt);
}

// "name=start:stop:count" or "name=a,b,c".
std::pair<std::string, Json> parse_sweep(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw CLI::ValidationError("--sweep", "expected name=start:stop:count or name=a,b,c");
  const std::string name = spec.substr(0, eq);
  const std::string body = spec.substr(eq + 1);
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double x = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return x;
    } catch (const std::exception&) {
      throw CLI::ValidationError("--sweep", "not a number: \"" + s + "\"");
    }
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    for (std::string part; std::getline(in, part, sep);) parts.push_back(part);
    return parts;
  };
  if (body.find(':') != std::string::npos) {
    const auto parts = split(body, ':');
    if (parts.size() != 3) throw CLI::ValidationError("--sweep", "expected start:stop:count");
    const double count = number(parts[2]);
    if (count != static_cast<double>(static_cast<long>(count)))
      throw CLI::ValidationError("--sweep", "count must be an integer");
    return {name, Json{{"start", number(parts[0])}, {"stop", number(parts[1])},
                       {"count", static_cast<long>(count)}}};
  }
  Json values = Json::array();
  for (const auto& part : split(body, ',')) values.push_back(number(part));
  return {name, values};
}

Json sweep_object(const std::vector<std::string>& specs) {
  Json sweep = Json::object();
  for (const auto& spec : specs) {
    auto [name, value] = parse_sweep(spec);
    sweep[name] = value;
  }
  return sweep;
}

Json grid_value(const std::string& text, const char* option) {
  auto [name, value] = parse_sweep(std::string("x=") + text);
  (void)name;
  if (!value.is_object() && !value.is_array())
    throw CLI::ValidationError(option, "expected start:stop:count or a,b,c");
  return value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite-boson statistics, two-site dissipative dynamics and branching fractions"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", cb_version());

  Options opt;
  app.add_option("--out", opt.out, "Output path (default: standard output)");
  app.add_option("--format", opt.format, "Output format: csv or json (default: scenario's, csv)")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", opt.threads, "Worker threads for sweeps (default: COBOSON_THREADS or 1)")
      ->check(CLI::Range(1, 1024));
  app.add_option("--branching-out", opt.branching_out,
                 "network: write the site,fraction table here instead of after the trajectory");

  std::optional<Json> document;

  // coboson
  auto* cob = app.add_subcommand("coboson", "Chi ratios, purity bounds and fragment norms for a Schmidt spectrum");
  std::string spectrum_file;
  long modes = 0;
  std::vector<double> weights;
  long cob_n_min = 1, cob_n_max = 10;
  auto* spectrum_opt = cob->add_option("--spectrum", spectrum_file, "Spectrum file: one weight per line, # comments");
  auto* modes_opt = cob->add_option("--modes", modes, "Uniform spectrum over J modes (default: 100 when nothing else is given)");
  auto* weights_opt = cob->add_option("--weights", weights, "Explicit weights")->delimiter(',');
  spectrum_opt->excludes(modes_opt, weights_opt);
  modes_opt->excludes(weights_opt);
  cob->add_option("--n-min", cob_n_min, "Smallest pair number")->capture_default_str();
  cob->add_option("--n-max", cob_n_max, "Largest pair number")->capture_default_str();
  cob->callback([&] {
    Json params{{"model", "spectrum"}, {"n_min", cob_n_min}, {"n_max", cob_n_max}};
    if (*spectrum_opt) params["spectrum_file"] = spectrum_file;
    if (*modes_opt) params["modes"] = modes;
    if (*weights_opt) params["weights"] = weights;
    document = Json{{"version", 1}, {"kind", "coboson_sweep"}, {"params", params}};
  });

  // qdot
  auto* qdot = app.add_subcommand("qdot", "g2(0) and bosonic deviation for excitons in a quantum dot");
  long q_n_min = 2, q_n_max = 100;
  std::vector<double> ratios{0.01, 0.03, 0.05, 0.07};
  qdot->add_option("--n-min", q_n_min, "Smallest pair number")->capture_default_str();
  qdot->add_option("--n-max", q_n_max, "Largest pair number")->capture_default_str();
  qdot->add_option("--r", ratios, "Bohr radius over dot size, a_B/L")->delimiter(',')->capture_default_str();
  qdot->callback([&] {
    document = Json{{"version", 1},
                    {"kind", "coboson_sweep"},
                    {"params", {{"model", "qdot"}, {"n_min", q_n_min}, {"n_max", q_n_max}}},
                    {"sweep", {{"r", ratios}}}};
  });

  // tunnel
  auto* tunnel = app.add_subcommand("tunnel", "Two-site populations P11, P12 over a time grid");
  double t_omega0 = 0.0, t_v = 1.0, t_g1 = 0.1, t_g2 = 0.1, t_max = 20.0, t_dt = 0.05, t_unit = 1.0;
  std::vector<std::string> t_sweep;
  tunnel->add_option("--omega0", t_omega0, "Detuning omega2 - omega1")->capture_default_str();
  tunnel->add_option("--v", t_v, "Tunneling coupling V")->capture_default_str();
  tunnel->add_option("--gamma1", t_g1, "Decay rate of site 1")->capture_default_str();
  tunnel->add_option("--gamma2", t_g2, "Decay rate of site 2")->capture_default_str();
  tunnel->add_option("--t-max", t_max, "Final time, in time units")->capture_default_str();
  tunnel->add_option("--dt", t_dt, "Output step, in time units")->capture_default_str();
  tunnel->add_option("--time-unit", t_unit, "Physical length of one time unit")->capture_default_str();
  tunnel->add_option("--sweep", t_sweep, "Sweep axis name=start:stop:count or name=a,b,c (omega0, v, gamma1, gamma2)");
  tunnel->callback([&] {
    document = Json{{"version", 1},
                    {"kind", "tunnel"},
                    {"params",
                     {{"omega0", t_omega0}, {"v", t_v}, {"gamma1", t_g1}, {"gamma2", t_g2},
                      {"t_max", t_max}, {"dt", t_dt}, {"time_unit", t_unit}}},
                    {"sweep", sweep_object(t_sweep)}};
  });

  // ep-scan
  auto* ep = app.add_subcommand("ep-scan", "|Omega|^2, regime and eigenvector coalescence over (V, gamma_diff)");
  std::string v_grid = "0:0.5:51", gd_grid = "-1:1:41";
  double ep_omega0 = 0.0;
  ep->add_option("--v-grid", v_grid, "Coupling grid start:stop:count or a,b,c")->capture_default_str();
  ep->add_option("--gamma-diff-grid", gd_grid, "Half decay difference grid")->capture_default_str();
  ep->add_option("--omega0", ep_omega0, "Detuning")->capture_default_str();
  ep->callback([&] {
    document = Json{{"version", 1},
                    {"kind", "ep_scan"},
                    {"params", {{"omega0", ep_omega0}}},
                    {"sweep",
                     {{"v", grid_value(v_grid, "--v-grid")},
                      {"gamma_diff", grid_value(gd_grid, "--gamma-diff-grid")}}}};
  });

  // branching
  auto* br = app.add_subcommand("branching", "F2 by closed form, time-domain and spectral quadrature");
  double b_omega0 = 0.5, b_v = 1.0, b_d1 = 0.1, b_d2 = 0.1, b_s1 = 1.0, b_s2 = 1.0;
  std::vector<std::string> b_sweep;
  br->add_option("--omega0", b_omega0, "Detuning")->capture_default_str();
  br->add_option("--v", b_v, "Tunneling coupling V")->capture_default_str();
  br->add_option("--delta1", b_d1, "Bosonic deviation of site 1")->capture_default_str();
  br->add_option("--delta2", b_d2, "Bosonic deviation of site 2")->capture_default_str();
  br->add_option("--scale1", b_s1, "Rate scale Delta1 (gamma1 = Delta1 delta1)")->capture_default_str();
  br->add_option("--scale2", b_s2, "Rate scale Delta2")->capture_default_str();
  br->add_option("--sweep", b_sweep, "Sweep axis name=start:stop:count or name=a,b,c (omega0, v, delta1, delta2)");
  br->callback([&] {
    document = Json{{"version", 1},
                    {"kind", "branching_sweep"},
                    {"params",
                     {{"omega0", b_omega0}, {"v", b_v}, {"delta1", b_d1}, {"delta2", b_d2},
                      {"scale1", b_s1}, {"scale2", b_s2}}},
                    {"sweep", sweep_object(b_sweep)}};
  });

  // network, run, preset
  std::string scenario_file;
  std::string preset_name;
  bool load_file = false;
  auto* net = app.add_subcommand("network", "Site-network trajectory and branching fractions from a scenario file");
  net->add_option("scenario", scenario_file, "Scenario file of kind network")->required();
  net->callback([&] { load_file = true; });
  auto* run = app.add_subcommand("run", "Run any scenario file");
  run->add_option("scenario", scenario_file, "Scenario file")->required();
  run->callback([&] { load_file = true; });
  auto* pre = app.add_subcommand("preset", "Run a figure scenario: fig1 fig2a fig2b fig3a fig3b fmo_demo");
  pre->add_option("name", preset_name, "Preset name")->required();

  // selftest
  auto* self = app.add_subcommand("selftest", "Randomized oracle-agreement checks; exit 0 iff all pass");
  std::uint64_t seed = 20240601;
  self->add_option("--seed", seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::fprintf(stderr, "usage_error: %s\n", e.what());
    return kUsage;
  }

  try {
    if (*self) {
      int passed = 0;
      char* report = nullptr;
      check(cb_selftest(seed, &passed, &report));
      write_text(opt.out, take(report));
      return passed ? kOk : kInternal;
    }
    if (document) {
      run_document(*document, opt);
      return kOk;
    }
    cb_scenario* scenario = nullptr;
    if (*pre) {
      check(cb_scenario_preset(preset_name.c_str(), &scenario));
    } else if (load_file) {
      check(cb_scenario_load(scenario_file.c_str(), &scenario));
      const char* kind = nullptr;
      check(cb_scenario_kind(scenario, &kind));
      if (*net && std::string(kind) != "network") {
        cb_scenario_free(scenario);
        throw Failure{CB_VALIDATION_ERROR, "kind == network (got " + std::string(kind) + ")"};
      }
    }
    run_and_emit(scenario, opt);
    return kOk;
  } catch (const Failure& f) {
    std::fprintf(stderr, "%s: %s\n", cb_status_name(f.status), f.message.c_str());
    return exit_code(f.status);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "usage_error: %s\n", e.what());
    return kUsage;
  }
}
