#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frag/commands.hpp"
#include "frag/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mixed discrete-continuous fragmentation solver"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::optional<std::string> out_dir;
  std::vector<double> times;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--preset", preset, "Built-in configuration")
        ->check(CLI::IsMember({"case1", "case2"}));
    sub->add_option("--out", out_dir, "Output directory (overrides outputs.dir)");
  };
  auto* validate = app.add_subcommand("validate", "Check kernel mass-balance hypotheses");
  auto* run = app.add_subcommand("run", "Integrate and write masses/snapshots");
  auto* exact = app.add_subcommand("exact", "Evaluate the closed-form solution");
  auto* compare = app.add_subcommand("compare", "Convergence study against the closed form");
  for (auto* sub : {validate, run, exact, compare}) add_common(sub);
  exact->add_option("--times", times, "Comma-separated evaluation times")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return frag::kConfigError;
  }

  try {
    const frag::RunConfig cfg = frag::load_config(
        config_path ? std::optional<std::filesystem::path>(*config_path) : std::nullopt,
        preset);
    const std::filesystem::path dir = out_dir ? *out_dir : cfg.outputs.dir;
    if (*validate) return frag::cmd_validate(cfg, std::cout);
    if (*run) return frag::cmd_run(cfg, dir, std::cout);
    if (*exact) {
      std::vector<double> when = times;
      if (when.empty()) when = cfg.outputs.snapshot_times;
      if (when.empty()) when = {cfg.t_final};
      return frag::cmd_exact(cfg, when, dir, std::cout);
    }
    return frag::cmd_compare(cfg, dir, std::cout);
  } catch (const frag::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return frag::kConfigError;
  } catch (const frag::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return frag::kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return frag::kRuntimeFailure;
  }
}
