#include "lsqflow/io/run.hpp"

#include "lsqflow/io/plot.hpp"
#include "lsqflow/io/serialize.hpp"
#include "lsqflow/simulate.hpp"
#include "lsqflow/spectral.hpp"
#include "lsqflow/switching.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace lsqflow::io {

namespace {

std::uint64_t seed_from_env() {
  const char* env = std::getenv("LSQFLOW_SEED");
  if (!env || !*env) return SupportOptions{}.seed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 0);
  if (*end != '\0') throw Error(ErrorKind::InvalidArgument, "LSQFLOW_SEED must be an unsigned integer");
  return v;
}

std::string output_path(const RunOptions& options, const std::string& name) {
  const std::filesystem::path dir(options.out_dir.value_or("."));
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path);
}

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Trajectory simulate(const RunConfig& cfg) {
  const NetworkLinearEquation problem = cfg.problem();
  const Eigen::Index nm = problem.n_nodes() * problem.dim();
  const Eigen::VectorXd v0 = cfg.v0.value_or(Eigen::VectorXd::Zero(nm));
  CtConfig ct;
  ct.step_h = cfg.step_h.value_or(ct.step_h);
  ct.t_end = cfg.t_end.value_or(ct.t_end);
  ct.record_every = cfg.record_every.value_or(ct.record_every);
  switch (cfg.mode) {
    case Mode::SimulateCt: {
      const AssembledFlow flow = assemble(problem, cfg.graph->to_graph());
      return cfg.alpha ? simulate_wang_elia(flow, *cfg.alpha, *cfg.x0, v0, ct) : simulate_ct(flow, *cfg.x0, v0, ct);
    }
    case Mode::SimulateDt: {
      DiscreteConfig dt;
      dt.epsilon = *cfg.epsilon;
      dt.max_steps = cfg.max_steps.value_or(dt.max_steps);
      dt.record_every = cfg.record_every.value_or(dt.record_every);
      return simulate_dt(assemble(problem, cfg.graph->to_graph()), *cfg.x0, v0, dt);
    }
    case Mode::SimulateSwitching: {
      std::vector<Graph> graphs;
      for (const auto& g : cfg.graphs) graphs.push_back(g.to_graph());
      return simulate_switching(problem, SwitchingSignal(*cfg.period_t, std::move(graphs)), *cfg.x0, v0, ct);
    }
    default:
      throw Error(ErrorKind::InvalidArgument, "not a simulation mode");
  }
}

int run_simulation(const RunConfig& cfg, const RunOptions& options, std::ostream& out, std::ostream& err) {
  const Trajectory traj = simulate(cfg);
  const std::string stem = cfg.label.value_or("trajectory");
  const std::string csv_path = output_path(options, stem + ".csv");
  write_text(csv_path, to_csv(traj));

  nlohmann::ordered_json summary;
  summary["status"] = traj.diverged() ? "diverged" : "ok";
  summary["csv"] = csv_path;
  if (options.plot) {
    PlotSpec spec = parse_plot_spec(*options.plot, traj.n_nodes, traj.dim);
    spec.title = stem;
    spec.x_label = traj.discrete ? "k" : "t";
    const std::string svg_path = output_path(options, stem + ".svg");
    write_text(svg_path, emit_plot(traj, spec));
    summary["svg"] = svg_path;
  }
  summary["samples"] = traj.samples.size();
  summary["final_t"] = traj.samples.back().t;
  summary["final_error"] = traj.samples.back().error;
  if (traj.divergence) {
    summary["diverged_at"] = traj.divergence->at;
    summary["diverged_step"] = traj.divergence->step;
    err << summary.dump() << '\n';
    return kExitDiverged;
  }
  out << summary.dump() << '\n';
  return kExitOk;
}

int run_feasibility(const RunConfig& cfg, const RunOptions& options, std::ostream& out) {
  SupportOptions support;
  support.seed = seed_from_env();
  std::string table = "family,n,min_support,closed_form,exhaustive\n";
  for (const auto& sweep : cfg.families) {
    for (int n : sweep.sizes) {
      const Graph g = make_family(sweep.family, n);
      const SupportReport report = support_report(spectrum(laplacian(g)), support);
      std::string closed = "NA";
      try {
        closed = std::to_string(family_min_support(sweep.family, n));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotCharacterized) throw;
      }
      table += std::string(to_string(sweep.family)) + "," + std::to_string(n) + "," +
               std::to_string(report.min_support) + "," + closed + "," + (report.exhaustive ? "true" : "false") + "\n";
    }
  }
  out << table;
  if (options.out_dir) write_text(output_path(options, cfg.label.value_or("feasibility") + ".csv"), table);
  return kExitOk;
}

int dispatch(const RunConfig& cfg, const RunOptions& options, std::ostream& out, std::ostream& err) {
  switch (cfg.mode) {
    case Mode::Analyze: {
      const NetworkLinearEquation problem = cfg.problem();
      const std::string text = report_json(analyze(problem, cfg.graph->to_graph()), solve_least_squares(problem));
      out << text;
      if (options.out_dir) write_text(output_path(options, cfg.label.value_or("report") + ".json"), text);
      return kExitOk;
    }
    case Mode::SolveLsq: {
      const std::string text = solution_json(solve_least_squares(cfg.problem()));
      out << text;
      if (options.out_dir) write_text(output_path(options, cfg.label.value_or("solution") + ".json"), text);
      return kExitOk;
    }
    case Mode::EpsilonStar:
      out << fmt17(epsilon_star(assemble(cfg.problem(), cfg.graph->to_graph()))) << '\n';
      return kExitOk;
    case Mode::GraphFeasibility:
      return run_feasibility(cfg, options, out);
    case Mode::SimulateCt:
    case Mode::SimulateDt:
    case Mode::SimulateSwitching:
      return run_simulation(cfg, options, out, err);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown mode");
}

}  // namespace

int run(const RunConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(config, options, out, err);
  } catch (const Error& e) {
    err << error_envelope(e);
  } catch (const std::exception& e) {
    err << error_envelope(Error(ErrorKind::IoError, e.what()));
  }
  return kExitError;
}

}  // namespace lsqflow::io
