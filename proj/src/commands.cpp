#include "frag/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <set>

#include <Eigen/Core>

#include "frag/errors.hpp"
#include "frag/parallel.hpp"

namespace frag {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  return out;
}

PowerLawParams params_of(const ModelSpec& spec) {
  return PowerLawParams{spec.alpha, spec.nu, spec.cutoff};
}

analytic::ExactContinuousSolution exact_solution(const RunConfig& cfg) {
  if (cfg.model.zero_transfer) {
    throw DomainError("analytic solution unavailable for modified kernels");
  }
  if (cfg.model.alpha == 0.0) {
    throw DomainError("analytic solution unavailable for alpha = 0");
  }
  return analytic::ExactContinuousSolution(params_of(cfg.model), cfg.initial.continuous);
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ValidationReport validate_model(const FragmentationModel& model, double x_max) {
  ValidationReport r;
  const double n = model.cutoff();
  std::vector<double> ys;
  constexpr int kSamples = 50;
  for (int k = 1; k <= kSamples; ++k) ys.push_back(n + (x_max - n) * k / kSamples);
  r.continuous = validate_continuous_balance(model, ys);
  r.discrete = validate_discrete_balance(model);
  r.honesty = check_honesty_hypothesis(model, x_max, 64);
  bool converged = true;
  for (const auto& s : r.continuous) {
    r.max_residual = std::max(r.max_residual, s.residual);
    converged = converged && s.converged;
  }
  for (double d : r.discrete) r.max_residual = std::max(r.max_residual, d);
  r.passed = converged && r.max_residual <= kBalanceGate && r.honesty.finite;
  return r;
}

json to_json(const ValidationReport& report) {
  json cont = json::array();
  for (const auto& s : report.continuous) {
    cont.push_back({{"y", s.y}, {"residual", s.residual}, {"converged", s.converged}});
  }
  json disc = json::array();
  for (std::size_t k = 0; k < report.discrete.size(); ++k) {
    disc.push_back({{"i", k + 2}, {"residual", report.discrete[k]}});
  }
  return json{{"continuous_balance", cont},
              {"discrete_balance", disc},
              {"honesty",
               {{"sup_near_cutoff", report.honesty.sup_near_cutoff},
                {"sup_local", report.honesty.sup_local},
                {"finite", report.honesty.finite}}},
              {"max_residual", report.max_residual},
              {"threshold", kBalanceGate},
              {"passed", report.passed}};
}

Vector cell_averages(const Grid& grid, const std::vector<analytic::Segment>& segments) {
  const auto& e = grid.edges();
  Vector u = Vector::Zero(static_cast<Eigen::Index>(grid.cells()));
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    double integral = 0.0;
    for (const auto& s : segments) {
      const double overlap = std::min(e[i + 1], s.hi) - std::max(e[i], s.lo);
      if (overlap > 0.0) integral += s.value * overlap;
    }
    u(static_cast<Eigen::Index>(i)) = integral / grid.widths()[i];
  }
  return u;
}

SystemState initial_state(const RunConfig& cfg, const Grid& grid) {
  for (const auto& s : cfg.initial.continuous) {
    if (s.value != 0.0 && (s.lo < grid.lower() || s.hi > grid.upper())) {
      throw DomainError("initial continuous density must be supported in (N, x_max]");
    }
  }
  SystemState s;
  s.discrete = to_vector(cfg.initial.discrete);
  s.continuous = cell_averages(grid, cfg.initial.continuous);
  s.time = 0.0;
  return s;
}

Simulation simulate(const RunConfig& cfg, std::size_t cells, std::vector<double> times) {
  const auto start = std::chrono::steady_clock::now();
  auto model = std::make_shared<const FragmentationModel>(build_model(cfg.model));
  if (!cfg.flags.force_unvalidated) {
    const double residual = max_balance_residual(*model, cfg.grid.x_max);
    if (!(residual <= kBalanceGate)) {
      throw DomainError("model fails the mass-balance check (max residual " +
                        format_double(residual) +
                        "); set flags.force_unvalidated to run anyway");
    }
  }
  const Grid grid = build_grid(cfg.model.cutoff, cfg.grid.x_max, cells, cfg.grid.scheme,
                               cfg.grid.ratio);
  Simulation sim;
  sim.ops = assemble(model, grid, cfg.flags.rescale);
  const SystemState init = initial_state(cfg, grid);

  IntegratorConfig integ = cfg.integrator;
  integ.output_times = std::move(times);
  try {
    sim.states = integrate(sim.ops, init, integ, &sim.stats);
  } catch (const IntegrationFailure& failure) {
    sim.failure = failure.what();
    const auto& partial = failure.partial();
    for (std::size_t k = 0; k < partial.states.size(); ++k) {
      sim.states.push_back(unpack(partial.states[k], sim.ops.cutoff(), partial.times[k]));
    }
    sim.stats.accepted_steps = partial.accepted_steps;
    sim.stats.rejected_steps = partial.rejected_steps;
  }
  for (const auto& s : sim.states) sim.series.push_back(masses(sim.ops, s));
  sim.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sim;
}

Simulation simulate(const RunConfig& cfg) {
  std::set<double> all(cfg.output_times.begin(), cfg.output_times.end());
  all.insert(cfg.outputs.snapshot_times.begin(), cfg.outputs.snapshot_times.end());
  return simulate(cfg, cfg.grid.cells, std::vector<double>(all.begin(), all.end()));
}

CompareReport run_compare(const RunConfig& cfg) {
  const auto sol = exact_solution(cfg);
  CompareReport report;
  report.time = cfg.compare.time;
  const double t = cfg.compare.time;

  const Eigen::VectorXd exact_d = analytic::exact_u_D(sol, to_vector(cfg.initial.discrete), t);
  const double exact_d_norm = norm_XD(exact_d);

  report.entries.resize(cfg.compare.resolutions.size());
  parallel_for(cfg.compare.resolutions.size(), [&](std::size_t k) {
    const std::size_t cells = cfg.compare.resolutions[k];
    const Simulation sim = simulate(cfg, cells, {t});
    if (sim.failure) throw RuntimeFailure("compare run failed: " + *sim.failure);
    const SystemState& s = sim.states.back();
    const auto& x = sim.ops.grid.centers();
    Vector exact_c(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
      exact_c(static_cast<Eigen::Index>(i)) = analytic::exact_u_C(sol, x[i], t);
    }
    CompareEntry& entry = report.entries[k];
    entry.cells = cells;
    entry.error_continuous =
        norm_XC(sim.ops, s.continuous - exact_c) / norm_XC(sim.ops, exact_c);
    entry.error_discrete = norm_XD(s.discrete - exact_d) / exact_d_norm;
  });

  for (std::size_t k = 0; k + 1 < report.entries.size(); ++k) {
    const double ratio =
        report.entries[k].error_continuous / report.entries[k + 1].error_continuous;
    report.ratios.push_back(ratio);
    report.orders.push_back(std::log2(ratio));
  }
  return report;
}

json to_json(const CompareReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"cells", e.cells},
                       {"error_continuous_l1x", e.error_continuous},
                       {"error_discrete_xd", e.error_discrete}});
  }
  return json{{"time", report.time},
              {"resolutions", entries},
              {"error_ratios", report.ratios},
              {"observed_orders", report.orders}};
}

void write_masses_csv(std::ostream& out, const std::vector<MassBreakdown>& series) {
  out << "t,M_total,M_C,M_D,M_monomer\n";
  for (const auto& b : series) {
    out << format_double(b.t) << ',' << format_double(b.total) << ','
        << format_double(b.continuous) << ',' << format_double(b.discrete) << ','
        << format_double(b.monomer) << '\n';
  }
}

void write_snapshot_csv(std::ostream& out, const Grid& grid, const Vector& discrete,
                        const Vector& continuous) {
  out << "kind,index_or_center,value\n";
  for (Eigen::Index k = 0; k < discrete.size(); ++k) {
    out << "discrete," << (k + 1) << ',' << format_double(discrete(k)) << '\n';
  }
  const auto& x = grid.centers();
  for (Eigen::Index i = 0; i < continuous.size(); ++i) {
    out << "continuous," << format_double(x[static_cast<std::size_t>(i)]) << ','
        << format_double(continuous(i)) << '\n';
  }
}

std::string snapshot_name(const std::string& stem, double t) {
  return stem + "_t" + format_double(t) + ".csv";
}

json dump_operators(const SemiDiscreteOperators& ops) {
  auto dense = [](const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return json{{"centers", ops.grid.centers()},
              {"widths", ops.grid.widths()},
              {"loss", std::vector<double>(ops.loss.begin(), ops.loss.end())},
              {"gain", dense(ops.gain)},
              {"coupling", dense(ops.coupling)},
              {"discrete", dense(ops.discrete)},
              {"rescaled", ops.rescaled}};
}

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
  const FragmentationModel model = build_model(cfg.model);
  const ValidationReport report = validate_model(model, cfg.grid.x_max);
  log << to_json(report).dump(2) << '\n';
  return report.passed ? kOk : kValidationError;
}

int cmd_run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const Simulation sim = simulate(cfg);
  std::filesystem::create_directories(out_dir);

  const std::set<double> wanted(cfg.output_times.begin(), cfg.output_times.end());
  std::vector<MassBreakdown> series;
  for (const auto& b : sim.series) {
    if (wanted.contains(b.t)) series.push_back(b);
  }
  {
    auto out = open_output(out_dir / "masses.csv");
    write_masses_csv(out, series);
  }

  json snapshots = json::array();
  if (cfg.outputs.write_snapshots) {
    const std::set<double> snap(cfg.outputs.snapshot_times.begin(),
                                cfg.outputs.snapshot_times.end());
    for (const auto& s : sim.states) {
      if (!snap.contains(s.time)) continue;
      const std::string name = snapshot_name("snapshot", s.time);
      auto out = open_output(out_dir / name);
      write_snapshot_csv(out, sim.ops.grid, s.discrete, s.continuous);
      snapshots.push_back({{"t", s.time}, {"file", name}});
    }
  }
  if (cfg.flags.dump_operators) {
    auto out = open_output(out_dir / "operators.json");
    out << dump_operators(sim.ops).dump() << '\n';
  }

  double drift = 0.0;
  double min_entry = std::numeric_limits<double>::infinity();
  const double m0 = sim.series.empty() ? 0.0 : sim.series.front().total;
  for (const auto& b : sim.series) drift = std::max(drift, std::abs(b.total - m0) / m0);
  for (const auto& s : sim.states) {
    min_entry = std::min({min_entry, s.discrete.minCoeff(), s.continuous.minCoeff()});
  }
  auto crossing = [&](MassComponent c) -> json {
    if (series.empty()) return nullptr;
    const auto t = time_to_fraction(series, c, 0.9);
    return t ? json(*t) : json(nullptr);
  };

  json meta{{"version", kVersion},
            {"compiler", __VERSION__},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"config", cfg.source},
            {"cells", cfg.grid.cells},
            {"wall_seconds", sim.wall_seconds},
            {"accepted_steps", sim.stats.accepted_steps},
            {"rejected_steps", sim.stats.rejected_steps},
            {"initial_mass", m0},
            {"conservation_drift", drift},
            {"min_entry", min_entry},
            {"time_to_0.9_discrete", crossing(MassComponent::discrete)},
            {"time_to_0.9_monomer", crossing(MassComponent::monomer)},
            {"snapshots", snapshots},
            {"status", sim.failure ? "failed" : "ok"},
            {"partial", sim.failure.has_value()}};
  if (!sim.states.empty()) {
    meta["final_equilibrium_residual"] = equilibrium_residual(sim.ops, sim.states.back());
  }
  if (sim.failure) meta["failure"] = *sim.failure;
  {
    auto out = open_output(out_dir / "metadata.json");
    out << meta.dump(2) << '\n';
  }

  if (sim.failure) {
    log << "integration failed: " << *sim.failure << " (partial outputs in "
        << out_dir.string() << ")\n";
    return kRuntimeFailure;
  }
  log << "wrote " << series.size() << " mass rows and " << snapshots.size()
      << " snapshots to " << out_dir.string() << " (max drift " << format_double(drift)
      << ")\n";
  return kOk;
}

int cmd_exact(const RunConfig& cfg, const std::vector<double>& times,
              const std::filesystem::path& out_dir, std::ostream& log) {
  const auto sol = exact_solution(cfg);
  const Grid grid = build_grid(cfg.model.cutoff, cfg.grid.x_max, cfg.grid.cells,
                               cfg.grid.scheme, cfg.grid.ratio);
  std::filesystem::create_directories(out_dir);
  const Eigen::VectorXd d0 = to_vector(cfg.initial.discrete);
  for (double t : times) {
    if (!(t >= 0.0)) throw ConfigError("exact times must be nonnegative");
    const Eigen::VectorXd discrete = analytic::exact_u_D(sol, d0, t);
    Vector continuous(static_cast<Eigen::Index>(grid.cells()));
    for (std::size_t i = 0; i < grid.cells(); ++i) {
      continuous(static_cast<Eigen::Index>(i)) =
          analytic::exact_u_C(sol, grid.centers()[i], t);
    }
    const std::string name = snapshot_name("exact", t);
    auto out = open_output(out_dir / name);
    write_snapshot_csv(out, grid, discrete, continuous);
    log << "wrote " << (out_dir / name).string() << '\n';
  }
  return kOk;
}

int cmd_compare(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const CompareReport report = run_compare(cfg);
  const json doc = to_json(report);
  std::filesystem::create_directories(out_dir);
  auto out = open_output(out_dir / "compare.json");
  out << doc.dump(2) << '\n';
  log << doc.dump(2) << '\n';
  return kOk;
}

}  // namespace frag
