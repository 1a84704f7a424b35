#include "frag/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "frag/errors.hpp"

namespace frag {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError("missing field \"" + where + key + "\"");
  }
  return obj.at(key);
}

double number(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError("field \"" + name + "\" must be a number");
  return v.get<double>();
}

long integer(const json& v, const std::string& name) {
  if (!v.is_number_integer()) throw ConfigError("field \"" + name + "\" must be an integer");
  return v.get<long>();
}

bool boolean(const json& v, const std::string& name) {
  if (!v.is_boolean()) throw ConfigError("field \"" + name + "\" must be a boolean");
  return v.get<bool>();
}

std::vector<double> numbers(const json& v, const std::string& name) {
  if (!v.is_array()) throw ConfigError("field \"" + name + "\" must be an array");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(number(e, name + "[]"));
  return out;
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError("\"" + where + "\" must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown field \"" + where + "." + key + "\"");
    }
  }
}

void check_increasing(const std::vector<double>& times, double t_final,
                      const std::string& name) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || times[k] > t_final) {
      throw ConfigError(name + " must lie in [0, t_final]");
    }
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw ConfigError(name + " must be strictly increasing");
    }
  }
}

json case_base() {
  return json{
      {"model", {{"alpha", -1.0}, {"nu", 0.0}, {"cutoff_N", 5}}},
      {"grid", {{"x_max", 15.0}, {"cells", 1000}, {"scheme", "uniform"}}},
      {"initial",
       {{"discrete", {1.0, 1.0, 1.0, 1.0, 1.0}},
        {"continuous", json::array({json::array({5.0, 15.0, 1.0})})}}},
      {"integrator", {{"rel_tol", 1e-10}, {"abs_tol", 1e-12}}},
      {"flags", {{"rescale", true}, {"force_unvalidated", false}}},
      {"compare", {{"resolutions", {250, 500, 1000, 2000}}, {"time", 4.0}}},
  };
}

}  // namespace

json preset_json(const std::string& name) {
  json doc = case_base();
  if (name == "case1") {
    doc["time"] = {{"t_final", 100.0}, {"output_count", 201}};
    doc["outputs"] = {{"dir", "out/case1"},
                      {"write_snapshots", true},
                      {"snapshot_times", {0.0, 4.0, 20.0, 100.0}}};
    return doc;
  }
  if (name == "case2") {
    doc["model"]["alpha"] = 0.5;
    doc["model"]["nu"] = -0.5;
    doc["time"] = {{"t_final", 5.0}, {"output_count", 201}};
    doc["outputs"] = {{"dir", "out/case2"},
                      {"write_snapshots", true},
                      {"snapshot_times", {0.0, 0.5, 1.0, 5.0}}};
    doc["compare"]["time"] = 1.0;
    return doc;
  }
  throw ConfigError("unknown preset \"" + name + "\" (expected case1 or case2)");
}

RunConfig parse_config(const json& doc) {
  check_keys(doc, {"model", "grid", "initial", "time", "integrator", "flags", "outputs", "compare"},
             "config");
  RunConfig cfg;
  cfg.source = doc;

  const json& model = require(doc, "model", "");
  check_keys(model, {"alpha", "nu", "cutoff_N", "zero_transfer"}, "model");
  cfg.model.alpha = number(require(model, "alpha", "model."), "model.alpha");
  cfg.model.nu = number(require(model, "nu", "model."), "model.nu");
  const long cutoff = integer(require(model, "cutoff_N", "model."), "model.cutoff_N");
  if (cutoff < 1) throw ConfigError("model.cutoff_N must be at least 1");
  cfg.model.cutoff = static_cast<int>(cutoff);
  if (model.contains("zero_transfer")) {
    cfg.model.zero_transfer = boolean(model["zero_transfer"], "model.zero_transfer");
  }

  const json& grid = require(doc, "grid", "");
  check_keys(grid, {"x_max", "cells", "scheme", "ratio"}, "grid");
  cfg.grid.x_max = number(require(grid, "x_max", "grid."), "grid.x_max");
  const long cells = integer(require(grid, "cells", "grid."), "grid.cells");
  if (cells < 1) throw ConfigError("grid.cells must be at least 1");
  cfg.grid.cells = static_cast<std::size_t>(cells);
  if (!(cfg.grid.x_max > cfg.model.cutoff)) throw ConfigError("grid.x_max must exceed cutoff_N");
  if (grid.contains("scheme")) {
    const auto scheme = grid["scheme"];
    if (scheme == "uniform") {
      cfg.grid.scheme = GridScheme::uniform;
    } else if (scheme == "geometric") {
      cfg.grid.scheme = GridScheme::geometric;
    } else {
      throw ConfigError("grid.scheme must be \"uniform\" or \"geometric\"");
    }
  }
  if (grid.contains("ratio")) {
    cfg.grid.ratio = number(grid["ratio"], "grid.ratio");
    if (cfg.grid.scheme == GridScheme::geometric && !(cfg.grid.ratio > 1.0)) {
      throw ConfigError("grid.ratio must exceed 1");
    }
  }

  const json& initial = require(doc, "initial", "");
  check_keys(initial, {"discrete", "continuous"}, "initial");
  cfg.initial.discrete = numbers(require(initial, "discrete", "initial."), "initial.discrete");
  if (cfg.initial.discrete.size() != static_cast<std::size_t>(cfg.model.cutoff)) {
    throw ConfigError("initial.discrete must have cutoff_N entries");
  }
  const json& segments = require(initial, "continuous", "initial.");
  if (!segments.is_array()) throw ConfigError("initial.continuous must be an array");
  for (const auto& s : segments) {
    const auto v = numbers(s, "initial.continuous[]");
    if (v.size() != 3) throw ConfigError("initial.continuous entries are [lo, hi, value]");
    if (!(v[0] >= cfg.model.cutoff) || !(v[1] <= cfg.grid.x_max) || !(v[0] < v[1])) {
      throw ConfigError("initial.continuous segments must lie within (N, x_max]");
    }
    cfg.initial.continuous.push_back({v[0], v[1], v[2]});
  }
  for (double d : cfg.initial.discrete) {
    if (!std::isfinite(d)) throw ConfigError("initial.discrete must be finite");
  }

  const json& time = require(doc, "time", "");
  check_keys(time, {"t_final", "output_times", "output_count"}, "time");
  cfg.t_final = number(require(time, "t_final", "time."), "time.t_final");
  if (!(cfg.t_final >= 0.0) || !std::isfinite(cfg.t_final)) {
    throw ConfigError("time.t_final must be finite and nonnegative");
  }
  if (time.contains("output_times") && time.contains("output_count")) {
    throw ConfigError("give either time.output_times or time.output_count, not both");
  }
  if (time.contains("output_times")) {
    cfg.output_times = numbers(time["output_times"], "time.output_times");
    if (cfg.output_times.empty()) throw ConfigError("time.output_times is empty");
  } else {
    const long count = time.contains("output_count")
                           ? integer(time["output_count"], "time.output_count")
                           : 101;
    if (count < 1) throw ConfigError("time.output_count must be at least 1");
    if (cfg.t_final == 0.0 || count == 1) {
      cfg.output_times = {cfg.t_final};
      if (cfg.t_final > 0.0) cfg.output_times.insert(cfg.output_times.begin(), 0.0);
    } else {
      for (long k = 0; k < count; ++k) {
        cfg.output_times.push_back(cfg.t_final * static_cast<double>(k) / (count - 1));
      }
    }
  }
  check_increasing(cfg.output_times, cfg.t_final, "time.output_times");

  if (doc.contains("integrator")) {
    const json& integ = doc["integrator"];
    check_keys(integ, {"rel_tol", "abs_tol", "initial_dt", "max_dt"}, "integrator");
    if (integ.contains("rel_tol")) cfg.integrator.rel_tol = number(integ["rel_tol"], "integrator.rel_tol");
    if (integ.contains("abs_tol")) cfg.integrator.abs_tol = number(integ["abs_tol"], "integrator.abs_tol");
    if (integ.contains("initial_dt")) cfg.integrator.initial_dt = number(integ["initial_dt"], "integrator.initial_dt");
    if (integ.contains("max_dt")) cfg.integrator.max_dt = number(integ["max_dt"], "integrator.max_dt");
  }
  if (!(cfg.integrator.rel_tol > 0.0) || !(cfg.integrator.abs_tol > 0.0)) {
    throw ConfigError("integrator tolerances must be positive");
  }

  if (doc.contains("flags")) {
    const json& flags = doc["flags"];
    check_keys(flags, {"rescale", "force_unvalidated", "dump_operators"}, "flags");
    if (flags.contains("rescale")) cfg.flags.rescale = boolean(flags["rescale"], "flags.rescale");
    if (flags.contains("force_unvalidated")) {
      cfg.flags.force_unvalidated = boolean(flags["force_unvalidated"], "flags.force_unvalidated");
    }
    if (flags.contains("dump_operators")) {
      cfg.flags.dump_operators = boolean(flags["dump_operators"], "flags.dump_operators");
    }
  }

  if (doc.contains("outputs")) {
    const json& out = doc["outputs"];
    check_keys(out, {"dir", "write_snapshots", "snapshot_times"}, "outputs");
    if (out.contains("dir")) {
      if (!out["dir"].is_string()) throw ConfigError("outputs.dir must be a string");
      cfg.outputs.dir = out["dir"].get<std::string>();
    }
    if (out.contains("write_snapshots")) {
      cfg.outputs.write_snapshots = boolean(out["write_snapshots"], "outputs.write_snapshots");
    }
    if (out.contains("snapshot_times")) {
      cfg.outputs.snapshot_times = numbers(out["snapshot_times"], "outputs.snapshot_times");
    }
  }
  check_increasing(cfg.outputs.snapshot_times, cfg.t_final, "outputs.snapshot_times");

  if (doc.contains("compare")) {
    const json& cmp = doc["compare"];
    check_keys(cmp, {"resolutions", "time"}, "compare");
    if (cmp.contains("resolutions")) {
      cfg.compare.resolutions.clear();
      if (!cmp["resolutions"].is_array()) throw ConfigError("compare.resolutions must be an array");
      for (const auto& r : cmp["resolutions"]) {
        const long cells_r = integer(r, "compare.resolutions[]");
        if (cells_r < 1) throw ConfigError("compare.resolutions entries must be positive");
        cfg.compare.resolutions.push_back(static_cast<std::size_t>(cells_r));
      }
      if (cfg.compare.resolutions.empty()) throw ConfigError("compare.resolutions is empty");
    }
    if (cmp.contains("time")) {
      cfg.compare.time = number(cmp["time"], "compare.time");
      if (!(cfg.compare.time >= 0.0)) throw ConfigError("compare.time must be nonnegative");
    }
  }
  return cfg;
}

RunConfig load_config(const std::optional<std::filesystem::path>& config_path,
                      const std::optional<std::string>& preset_name) {
  if (!config_path && !preset_name) {
    throw ConfigError("either --config or --preset is required");
  }
  json doc = preset_name ? preset_json(*preset_name) : json::object();
  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path->string());
    json file;
    try {
      in >> file;
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    doc.merge_patch(file);
  }
  return parse_config(doc);
}

RunConfig preset(const std::string& name) { return parse_config(preset_json(name)); }

FragmentationModel build_model(const ModelSpec& spec) {
  FragmentationModel model = make_power_law(spec.alpha, spec.nu, spec.cutoff);
  if (spec.zero_transfer) return without_transfer(model);
  return model;
}

}  // namespace frag
