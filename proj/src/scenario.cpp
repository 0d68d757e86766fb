#include "coboson/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "coboson/coboson_stats.hpp"
#include "coboson/dynamics.hpp"
#include "coboson/errors.hpp"

namespace coboson {

namespace {

enum class ParamType { number, integer, text, number_list, matrix };

enum class Bound { any, non_negative, positive, at_least_one, at_least_two };

struct ParamSpec {
  const char* key;
  ParamType type;
  Json fallback;  // null: optional without default
  Bound bound = Bound::any;
  bool sweepable = false;
  bool required = false;
};

const char* bound_text(Bound bound) {
  switch (bound) {
    case Bound::non_negative: return ">= 0";
    case Bound::positive: return "> 0";
    case Bound::at_least_one: return ">= 1";
    case Bound::at_least_two: return ">= 2";
    case Bound::any: break;
  }
  return "finite";
}

bool satisfies(Bound bound, double x) {
  if (!std::isfinite(x)) return false;
  switch (bound) {
    case Bound::non_negative: return x >= 0.0;
    case Bound::positive: return x > 0.0;
    case Bound::at_least_one: return x >= 1.0;
    case Bound::at_least_two: return x >= 2.0;
    case Bound::any: break;
  }
  return true;
}

std::string number_text(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

[[noreturn]] void invalid(const std::string& message) { throw ValidationError(message); }

void check_bound(const std::string& label, const ParamSpec& spec, double x) {
  if (!satisfies(spec.bound, x))
    invalid(label + std::string(spec.key) + " " + bound_text(spec.bound) + " (got " +
            number_text(x) + ")");
}

double as_number(const Json& value, const std::string& key) {
  if (!value.is_number()) invalid(key + " must be a number");
  return value.get<double>();
}

long as_integer(const Json& value, const std::string& key) {
  if (!value.is_number_integer()) invalid(key + " must be an integer");
  return value.get<long>();
}

std::vector<double> as_number_list(const Json& value, const std::string& key) {
  if (!value.is_array()) invalid(key + " must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : value) out.push_back(as_number(x, key + " entries"));
  return out;
}

const std::vector<ParamSpec>& qdot_schema() {
  static const std::vector<ParamSpec> schema{
      {"model", ParamType::text, "qdot"},
      {"n_min", ParamType::integer, 2, Bound::at_least_two},
      {"n_max", ParamType::integer, 100, Bound::at_least_two},
      {"r", ParamType::number, 0.01, Bound::non_negative, true},
  };
  return schema;
}

const std::vector<ParamSpec>& spectrum_schema() {
  static const std::vector<ParamSpec> schema{
      {"model", ParamType::text, "spectrum"},
      {"n_min", ParamType::integer, 1, Bound::at_least_one},
      {"n_max", ParamType::integer, 10, Bound::at_least_one},
      {"modes", ParamType::integer, Json(), Bound::at_least_one},
      {"weights", ParamType::number_list, Json(), Bound::non_negative},
      {"spectrum_file", ParamType::text, Json()},
  };
  return schema;
}

const std::vector<ParamSpec>& tunnel_schema() {
  static const std::vector<ParamSpec> schema{
      {"omega0", ParamType::number, 0.0, Bound::any, true},
      {"v", ParamType::number, 1.0, Bound::non_negative, true},
      {"gamma1", ParamType::number, 0.1, Bound::non_negative, true},
      {"gamma2", ParamType::number, 0.1, Bound::non_negative, true},
      {"t_max", ParamType::number, 20.0, Bound::non_negative},
      {"dt", ParamType::number, 0.05, Bound::positive},
      {"time_unit", ParamType::number, 1.0, Bound::positive},
  };
  return schema;
}

const std::vector<ParamSpec>& ep_scan_schema() {
  static const std::vector<ParamSpec> schema{
      {"omega0", ParamType::number, 0.0},
  };
  return schema;
}

const std::vector<ParamSpec>& branching_schema() {
  static const std::vector<ParamSpec> schema{
      {"omega0", ParamType::number, 0.5, Bound::any, true},
      {"v", ParamType::number, 1.0, Bound::non_negative, true},
      {"delta1", ParamType::number, 0.1, Bound::positive, true},
      {"delta2", ParamType::number, 0.1, Bound::positive, true},
      {"scale1", ParamType::number, 1.0, Bound::positive},
      {"scale2", ParamType::number, 1.0, Bound::positive},
      {"spectral_target", ParamType::number, 1e-8, Bound::positive},
      {"time_tol", ParamType::number, 1e-12, Bound::positive},
  };
  return schema;
}

const std::vector<ParamSpec>& network_schema() {
  static const std::vector<ParamSpec> schema{
      {"energies", ParamType::number_list, Json(), Bound::any, false, true},
      {"decays", ParamType::number_list, Json(), Bound::non_negative, false, true},
      {"couplings", ParamType::matrix, Json(), Bound::any, false, true},
      {"initial_site", ParamType::integer, 1, Bound::at_least_one},
      {"t_max", ParamType::number, 20.0, Bound::non_negative},
      {"dt", ParamType::number, 0.05, Bound::positive},
      {"horizon", ParamType::number, 0.0, Bound::non_negative},
      {"tol", ParamType::number, 1e-9, Bound::positive},
      {"description", ParamType::text, ""},
  };
  return schema;
}

const std::vector<ParamSpec>& schema_for(ScenarioKind kind, const Json& raw_params) {
  switch (kind) {
    case ScenarioKind::coboson_sweep: {
      std::string model = "spectrum";
      if (raw_params.contains("model")) {
        if (!raw_params["model"].is_string()) invalid("model must be a string");
        model = raw_params["model"].get<std::string>();
      }
      if (model == "qdot") return qdot_schema();
      if (model == "spectrum") return spectrum_schema();
      invalid("model must be one of: spectrum, qdot (got \"" + model + "\")");
    }
    case ScenarioKind::tunnel: return tunnel_schema();
    case ScenarioKind::ep_scan: return ep_scan_schema();
    case ScenarioKind::branching_sweep: return branching_schema();
    case ScenarioKind::network: return network_schema();
  }
  invalid("unknown kind");
}

Json normalize_param(const ParamSpec& spec, const Json& value) {
  const std::string key = spec.key;
  switch (spec.type) {
    case ParamType::number: {
      const double x = as_number(value, key);
      check_bound("", spec, x);
      return x;
    }
    case ParamType::integer: {
      const long x = as_integer(value, key);
      check_bound("", spec, static_cast<double>(x));
      return x;
    }
    case ParamType::text:
      if (!value.is_string()) invalid(key + " must be a string");
      return value;
    case ParamType::number_list: {
      Json out = Json::array();
      for (double x : as_number_list(value, key)) {
        if (!satisfies(spec.bound, x))
          invalid(key + " entries " + bound_text(spec.bound) + " (got " + number_text(x) + ")");
        out.push_back(x);
      }
      if (out.empty()) invalid(key + " must not be empty");
      return out;
    }
    case ParamType::matrix: {
      if (!value.is_array()) invalid(key + " must be a list of rows");
      Json out = Json::array();
      for (const auto& row : value) {
        Json r = Json::array();
        for (double x : as_number_list(row, key + " rows")) {
          if (!std::isfinite(x)) invalid(key + " entries finite");
          r.push_back(x);
        }
        out.push_back(std::move(r));
      }
      return out;
    }
  }
  return value;
}

std::vector<double> linspace(const Linspace& range) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(range.count));
  if (range.count == 1) return {range.start};
  for (long i = 0; i < range.count; ++i) {
    if (i == range.count - 1) {
      out.push_back(range.stop);
    } else {
      out.push_back(range.start + (range.stop - range.start) * static_cast<double>(i) /
                                      static_cast<double>(range.count - 1));
    }
  }
  return out;
}

void reject_unknown(const Json& object, const std::vector<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      invalid("unknown key \"" + where + key + "\" (allowed: " + list + ")");
    }
  }
}

SweepAxis parse_axis(const std::string& name, const Json& value) {
  SweepAxis axis{name, std::nullopt, {}};
  const std::string label = "sweep." + name;
  if (value.is_array()) {
    axis.values = as_number_list(value, label);
  } else if (value.is_object()) {
    reject_unknown(value, {"start", "stop", "count"}, label + ".");
    for (const char* k : {"start", "stop", "count"})
      if (!value.contains(k)) invalid(label + "." + k + " is required");
    Linspace range{as_number(value["start"], label + ".start"),
                   as_number(value["stop"], label + ".stop"),
                   as_integer(value["count"], label + ".count")};
    if (!std::isfinite(range.start) || !std::isfinite(range.stop))
      invalid(label + " start and stop finite");
    if (range.count < 1) invalid(label + ".count >= 1 (got " + std::to_string(range.count) + ")");
    if (range.count > 1000000) invalid(label + ".count <= 1000000");
    axis.values = linspace(range);
    axis.range = range;
  } else {
    invalid(label + " must be a list of numbers or {start, stop, count}");
  }
  if (axis.values.empty()) invalid(label + " must not be empty");
  return axis;
}

bool strictly_increasing(const std::vector<double>& v) {
  return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return !(a < b); }) ==
         v.end();
}

// All values a sweepable parameter takes across the scenario.
std::vector<double> values_of(const Scenario& s, const std::string& key) {
  if (const SweepAxis* axis = s.axis(key)) return axis->values;
  return {s.params[key].get<double>()};
}

void cross_validate(Scenario& s) {
  switch (s.kind) {
    case ScenarioKind::coboson_sweep: {
      const long n_min = s.integer("n_min");
      const long n_max = s.integer("n_max");
      if (n_max < n_min)
        invalid("n_max >= n_min (got " + std::to_string(n_max) + " < " + std::to_string(n_min) +
                ")");
      if (s.text("model") == "qdot") {
        for (double r : values_of(s, "r")) {
          const long long limit = QuantumDotGeometry(r).max_pair_number();
          if (limit > 0 && n_max > limit)
            invalid("n_max <= " + std::to_string(limit) + " for r = " + number_text(r) +
                    " (validity bound n - 1 < 1/(2 r^2))");
        }
        break;
      }
      const int sources = static_cast<int>(s.params.contains("modes")) +
                          static_cast<int>(s.params.contains("weights")) +
                          static_cast<int>(s.params.contains("spectrum_file"));
      if (sources > 1) invalid("exactly one of modes, weights, spectrum_file");
      if (sources == 0) s.params["modes"] = 100;
      std::size_t occupied = 0;
      if (s.params.contains("modes")) {
        occupied = static_cast<std::size_t>(s.integer("modes"));
      } else if (s.params.contains("weights")) {
        std::vector<double> w = s.params["weights"].get<std::vector<double>>();
        if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; }))
          invalid("weights must contain a positive entry");
        occupied = static_cast<std::size_t>(std::count_if(w.begin(), w.end(), [](double x) {
          return x > 0.0;
        }));
      }
      if (occupied > 0 && static_cast<std::size_t>(n_max) > occupied)
        invalid("n_max <= " + std::to_string(occupied) + " (number of occupied modes)");
      // Keep the schema order when a default source was added.
      Json ordered = Json::object();
      for (const auto& spec : spectrum_schema())
        if (s.params.contains(spec.key)) ordered[spec.key] = s.params[spec.key];
      s.params = std::move(ordered);
      break;
    }
    case ScenarioKind::tunnel:
      break;
    case ScenarioKind::ep_scan: {
      if (s.axis("v") == nullptr)
        s.sweep.push_back({"v", Linspace{0.0, 0.5, 51}, linspace({0.0, 0.5, 51})});
      if (s.axis("gamma_diff") == nullptr)
        s.sweep.push_back(
            {"gamma_diff", Linspace{-1.0, 1.0, 41}, linspace({-1.0, 1.0, 41})});
      for (const auto& axis : s.sweep) {
        if (!strictly_increasing(axis.values))
          invalid("sweep." + axis.name + " strictly increasing");
      }
      const auto& v = s.axis("v")->values;
      if (v.front() < 0.0) invalid("sweep.v: v >= 0 (got " + number_text(v.front()) + ")");
      break;
    }
    case ScenarioKind::branching_sweep:
      break;
    case ScenarioKind::network: {
      const auto energies = s.params["energies"].get<std::vector<double>>();
      const auto decays = s.params["decays"].get<std::vector<double>>();
      const auto& rows = s.params["couplings"];
      const std::size_t m = energies.size();
      if (decays.size() != m)
        invalid("decays length == energies length (" + std::to_string(decays.size()) +
                " vs " + std::to_string(m) + ")");
      if (rows.size() != m) invalid("couplings must be " + std::to_string(m) + "x" +
                                    std::to_string(m));
      Eigen::MatrixXd c(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < m; ++i) {
        if (rows[i].size() != m)
          invalid("couplings must be " + std::to_string(m) + "x" + std::to_string(m));
        for (std::size_t j = 0; j < m; ++j)
          c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
      }
      try {
        SiteNetwork(energies, decays, c);
      } catch (const Error& e) {
        invalid(std::string("couplings: ") + e.what());
      }
      if (static_cast<std::size_t>(s.integer("initial_site")) > m)
        invalid("initial_site <= " + std::to_string(m));
      break;
    }
  }
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

const std::map<std::string, ScenarioKind, std::less<>>& kinds() {
  static const std::map<std::string, ScenarioKind, std::less<>> table{
      {"coboson_sweep", ScenarioKind::coboson_sweep},
      {"tunnel", ScenarioKind::tunnel},
      {"ep_scan", ScenarioKind::ep_scan},
      {"branching_sweep", ScenarioKind::branching_sweep},
      {"network", ScenarioKind::network},
  };
  return table;
}

}  // namespace

const char* scenario_kind_name(ScenarioKind kind) noexcept {
  switch (kind) {
    case ScenarioKind::coboson_sweep: return "coboson_sweep";
    case ScenarioKind::tunnel: return "tunnel";
    case ScenarioKind::ep_scan: return "ep_scan";
    case ScenarioKind::branching_sweep: return "branching_sweep";
    case ScenarioKind::network: return "network";
  }
  return "unknown";
}

double Scenario::number(std::string_view key) const { return params.at(std::string(key)).get<double>(); }

long Scenario::integer(std::string_view key) const { return params.at(std::string(key)).get<long>(); }

std::string Scenario::text(std::string_view key) const {
  return params.at(std::string(key)).get<std::string>();
}

const SweepAxis* Scenario::axis(std::string_view name) const {
  for (const auto& a : sweep)
    if (a.name == name) return &a;
  return nullptr;
}

Scenario scenario_from_json(const Json& doc) {
  if (!doc.is_object()) invalid("scenario must be a JSON object");
  reject_unknown(doc, {"version", "kind", "params", "sweep", "output"}, "");

  Scenario s;
  if (!doc.contains("version")) invalid("version is required");
  s.version = static_cast<int>(as_integer(doc["version"], "version"));
  if (s.version > kScenarioVersion)
    invalid("version <= " + std::to_string(kScenarioVersion) + " (got " +
            std::to_string(s.version) + ")");
  if (s.version < 1) invalid("version >= 1 (got " + std::to_string(s.version) + ")");

  if (!doc.contains("kind")) invalid("kind is required");
  if (!doc["kind"].is_string()) invalid("kind must be a string");
  const auto kind_name = doc["kind"].get<std::string>();
  const auto found = kinds().find(kind_name);
  if (found == kinds().end())
    invalid("kind must be one of: coboson_sweep, tunnel, ep_scan, branching_sweep, network (got \"" +
            kind_name + "\")");
  s.kind = found->second;

  const Json raw_params = doc.contains("params") ? doc["params"] : Json::object();
  if (!raw_params.is_object()) invalid("params must be an object");
  const auto& schema = schema_for(s.kind, raw_params);
  std::vector<std::string> keys;
  for (const auto& spec : schema) keys.emplace_back(spec.key);
  reject_unknown(raw_params, keys, "params.");
  for (const auto& spec : schema) {
    if (raw_params.contains(spec.key)) {
      s.params[spec.key] = normalize_param(spec, raw_params[spec.key]);
    } else if (spec.required) {
      invalid(std::string("params.") + spec.key + " is required for kind " + kind_name);
    } else if (!spec.fallback.is_null()) {
      s.params[spec.key] = spec.fallback;
      if (spec.type == ParamType::number) s.params[spec.key] = spec.fallback.get<double>();
    }
  }

  if (doc.contains("sweep")) {
    const Json& sweep = doc["sweep"];
    if (!sweep.is_object()) invalid("sweep must be an object");
    std::vector<std::string> allowed;
    if (s.kind == ScenarioKind::ep_scan) {
      allowed = {"v", "gamma_diff"};
    } else {
      for (const auto& spec : schema)
        if (spec.sweepable) allowed.emplace_back(spec.key);
    }
    reject_unknown(sweep, allowed, "sweep.");
    if (sweep.size() > 2) invalid("sweep has at most 2 axes");
    for (const auto& [name, value] : sweep.items()) {
      SweepAxis axis = parse_axis(name, value);
      for (const auto& spec : schema) {
        if (spec.key != name) continue;
        for (double x : axis.values) check_bound("sweep." + name + ": ", spec, x);
      }
      for (double x : axis.values)
        if (!std::isfinite(x)) invalid("sweep." + name + " entries finite");
      s.sweep.push_back(std::move(axis));
    }
  }

  if (doc.contains("output")) {
    const Json& out = doc["output"];
    if (!out.is_object()) invalid("output must be an object");
    reject_unknown(out, {"path", "format"}, "output.");
    if (out.contains("path")) {
      if (!out["path"].is_string()) invalid("output.path must be a string");
      s.output.path = out["path"].get<std::string>();
    }
    if (out.contains("format")) {
      if (!out["format"].is_string()) invalid("output.format must be a string");
      s.output.format = out["format"].get<std::string>();
    }
    if (s.output.format != "csv" && s.output.format != "json")
      invalid("output.format must be one of: csv, json (got \"" + s.output.format + "\")");
  }

  cross_validate(s);
  return s;
}

Scenario load_scenario(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = line_and_column(document, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    const auto cut = what.find(": ");
    if (cut != std::string::npos) what = what.substr(cut + 2);
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                     ": " + what);
  }
  return scenario_from_json(doc);
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open scenario file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return load_scenario(text.str());
}

Json scenario_to_json(const Scenario& s) {
  Json doc = Json::object();
  doc["version"] = s.version;
  doc["kind"] = scenario_kind_name(s.kind);
  doc["params"] = s.params;
  Json sweep = Json::object();
  for (const auto& axis : s.sweep) {
    if (axis.range) {
      sweep[axis.name] = {{"start", axis.range->start},
                          {"stop", axis.range->stop},
                          {"count", axis.range->count}};
    } else {
      sweep[axis.name] = axis.values;
    }
  }
  doc["sweep"] = sweep;
  doc["output"] = {{"path", s.output.path}, {"format", s.output.format}};
  return doc;
}

std::string serialize_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Presets.

namespace {

Json range(double start, double stop, long count) {
  return {{"start", start}, {"stop", stop}, {"count", count}};
}

// Two 3-site trimers with uniform internal coupling, one bridge 3-4, and a
// single lossy reaction-center site. Site energies are staggered so that no
// eigenmode is dark to the lossy site.
Json fmo_demo_params() {
  const double j = 1.0;
  const double bridge = 0.3;
  std::vector<std::vector<double>> c(6, std::vector<double>(6, 0.0));
  auto link = [&](int a, int b, double value) { c[a][b] = c[b][a] = value; };
  link(0, 1, j);
  link(1, 2, j);
  link(0, 2, j);
  link(3, 4, j);
  link(4, 5, j);
  link(3, 5, j);
  link(2, 3, bridge);
  Json couplings = Json::array();
  for (const auto& row : c) couplings.push_back(row);
  return {{"energies", {0.0, 0.12, -0.08, 0.05, -0.15, 0.2}},
          {"decays", {0.0, 0.0, 0.0, 0.0, 0.0, 0.5}},
          {"couplings", couplings},
          {"initial_site", 1},
          {"t_max", 40.0},
          {"dt", 0.1},
          {"description",
           "illustrative parameters, not measured values: two 3-site trimers (uniform intra-trimer "
           "coupling 1, bridge 0.3 between sites 3 and 4), reaction-center decay 0.5 on site 6"}};
}

Json preset_document(std::string_view name) {
  // fig2a/fig2b time unit: 1/|Omega| at V = 1, gamma1 = gamma2 = 0.1, omega0 = 0.
  const double t0 = 1.0 / std::abs(TwoSiteSystem(0.0, 0.0, 1.0, 0.1, 0.1).omega());
  if (name == "fig1")
    return {{"version", 1},
            {"kind", "coboson_sweep"},
            {"params", {{"model", "qdot"}, {"n_min", 2}, {"n_max", 100}}},
            {"sweep", {{"r", {0.01, 0.03, 0.05, 0.07}}}}};
  if (name == "fig2a")
    return {{"version", 1},
            {"kind", "tunnel"},
            {"params",
             {{"omega0", 0.0}, {"gamma1", 0.1}, {"gamma2", 0.1}, {"t_max", 40.0}, {"dt", 0.2},
              {"time_unit", t0}}},
            {"sweep", {{"v", range(0.1, 2.0, 20)}}}};
  if (name == "fig2b")
    return {{"version", 1},
            {"kind", "tunnel"},
            {"params",
             {{"omega0", 0.0}, {"v", 1.0}, {"gamma1", 0.0}, {"t_max", 40.0}, {"dt", 0.2},
              {"time_unit", t0}}},
            {"sweep", {{"gamma2", range(0.0, 1.0, 21)}}}};
  if (name == "fig3a")
    return {{"version", 1},
            {"kind", "branching_sweep"},
            {"params", {{"omega0", 0.5}, {"v", 1.0}}},
            {"sweep", {{"delta1", range(0.02, 0.5, 25)}, {"delta2", range(0.02, 0.5, 25)}}}};
  if (name == "fig3b")
    return {{"version", 1},
            {"kind", "branching_sweep"},
            {"params", {{"v", 5.0}, {"delta1", 0.1}}},
            {"sweep", {{"omega0", range(0.0, 2.0, 21)}, {"delta2", range(0.02, 0.5, 25)}}}};
  if (name == "fmo_demo")
    return {{"version", 1}, {"kind", "network"}, {"params", fmo_demo_params()}};
  std::string list;
  for (const auto& p : preset_names()) list += (list.empty() ? "" : ", ") + p;
  throw ValidationError("unknown preset \"" + std::string(name) + "\" (known: " + list + ")");
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig1",  "fig2a", "fig2b",
                                              "fig3a", "fig3b", "fmo_demo"};
  return names;
}

Scenario preset(std::string_view name) { return scenario_from_json(preset_document(name)); }

// ---------------------------------------------------------------------------
// Serialization of results.

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", value);
  return buf;
}

namespace {

std::string cell_text(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

Json cell_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return *d == 0.0 ? 0.0 : *d;
  if (const auto* i = std::get_if<long long>(&cell)) return *i;
  return std::get<std::string>(cell);
}

Json table_rows(const Table& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json r = Json::array();
    for (const auto& cell : row) r.push_back(cell_json(cell));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += cell_text(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_csv(const RunResult& result) {
  std::string out = to_csv(result.table);
  if (result.branching) out += "\n" + to_csv(*result.branching);
  return out;
}

std::string to_json(const RunResult& result) {
  Json doc = Json::object();
  doc["scenario"] = scenario_to_json(result.scenario);
  doc["columns"] = result.table.columns;
  doc["rows"] = table_rows(result.table);
  if (result.branching) {
    doc["branching"] = {{"columns", result.branching->columns},
                        {"rows", table_rows(*result.branching)}};
  }
  doc["metadata"] = result.metadata;
  return doc.dump(2) + "\n";
}

}  // namespace coboson
