#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "frag/analytic.hpp"
#include "frag/grid.hpp"
#include "frag/integrator.hpp"
#include "frag/kernels.hpp"

namespace frag {

struct ModelSpec {
  double alpha = 0.0;
  double nu = 0.0;
  int cutoff = 1;
  bool zero_transfer = false;  // drop b_i(y): a deliberately unbalanced kernel
};

struct GridSpec {
  double x_max = 0.0;
  std::size_t cells = 0;
  GridScheme scheme = GridScheme::uniform;
  double ratio = 2.0;
};

struct InitialSpec {
  std::vector<double> discrete;
  std::vector<analytic::Segment> continuous;
};

struct RunFlags {
  bool rescale = true;
  bool force_unvalidated = false;
  bool dump_operators = false;
};

struct OutputSpec {
  std::string dir = "out";
  bool write_snapshots = true;
  std::vector<double> snapshot_times;
};

struct CompareSpec {
  std::vector<std::size_t> resolutions{250, 500, 1000, 2000};
  double time = 4.0;
};

/// Fully validated run configuration.
struct RunConfig {
  ModelSpec model;
  GridSpec grid;
  InitialSpec initial;
  double t_final = 0.0;
  std::vector<double> output_times;
  IntegratorConfig integrator;
  RunFlags flags;
  OutputSpec outputs;
  CompareSpec compare;
  nlohmann::json source;  // the merged document the config was parsed from
};

/// Built-in presets as JSON documents; throws ConfigError for unknown names.
nlohmann::json preset_json(const std::string& name);

/// Parses and validates a config document. Throws ConfigError on missing or
/// ill-typed fields and on violated invariants (segment bounds, output times
/// beyond t_final, wrong discrete length).
RunConfig parse_config(const nlohmann::json& doc);

/// Reads `config_path` (if given) and merge-patches it over `preset` (if
/// given). At least one must be present.
RunConfig load_config(const std::optional<std::filesystem::path>& config_path,
                      const std::optional<std::string>& preset);

RunConfig preset(const std::string& name);

/// Model described by the config, without running the balance gate.
FragmentationModel build_model(const ModelSpec& spec);

}  // namespace frag
