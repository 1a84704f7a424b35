#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "frag/config.hpp"
#include "frag/diagnostics.hpp"
#include "frag/operators.hpp"

namespace frag {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Exit-code contract of the CLI.
enum ExitCode : int { kOk = 0, kConfigError = 1, kValidationError = 2, kRuntimeFailure = 3 };

struct ValidationReport {
  std::vector<BalanceSample> continuous;
  std::vector<double> discrete;  // i = 2..N
  HonestyReport honesty;
  double max_residual = 0.0;
  bool passed = false;
};

ValidationReport validate_model(const FragmentationModel& model, double x_max);
nlohmann::json to_json(const ValidationReport& report);

/// Cell averages of the piecewise-constant initial density.
Vector cell_averages(const Grid& grid, const std::vector<analytic::Segment>& segments);

SystemState initial_state(const RunConfig& cfg, const Grid& grid);

/// Output of a completed (or partially completed) simulation.
struct Simulation {
  SemiDiscreteOperators ops;
  std::vector<SystemState> states;
  std::vector<MassBreakdown> series;
  IntegrationStats stats;
  double wall_seconds = 0.0;
  std::optional<std::string> failure;
};

/// Model gate + grid + assembly + integration over the union of output and
/// snapshot times. Throws DomainError when the model fails the balance gate
/// without force_unvalidated; integration failures are returned in
/// `failure` with the states recorded so far.
Simulation simulate(const RunConfig& cfg);

/// Same pipeline with the grid resolution and output times overridden.
Simulation simulate(const RunConfig& cfg, std::size_t cells, std::vector<double> times);

struct CompareEntry {
  std::size_t cells = 0;
  double error_continuous = 0.0;  // relative L1(x dx)
  double error_discrete = 0.0;    // relative norm_XD
};

struct CompareReport {
  double time = 0.0;
  std::vector<CompareEntry> entries;
  std::vector<double> ratios;  // error_continuous[k] / error_continuous[k+1]
  std::vector<double> orders;  // log2 of ratios
};

/// Solver-vs-oracle errors at each resolution in cfg.compare. Throws
/// DomainError for alpha == 0.
CompareReport run_compare(const RunConfig& cfg);
nlohmann::json to_json(const CompareReport& report);

void write_masses_csv(std::ostream& out, const std::vector<MassBreakdown>& series);
void write_snapshot_csv(std::ostream& out, const Grid& grid, const Vector& discrete,
                        const Vector& continuous);
std::string snapshot_name(const std::string& stem, double t);

nlohmann::json dump_operators(const SemiDiscreteOperators& ops);

// Subcommands. Each returns an ExitCode; reports go to `log`.
int cmd_validate(const RunConfig& cfg, std::ostream& log);
int cmd_run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_exact(const RunConfig& cfg, const std::vector<double>& times,
              const std::filesystem::path& out_dir, std::ostream& log);
int cmd_compare(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace frag
