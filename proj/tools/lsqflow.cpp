#include "lsqflow/io/config.hpp"
#include "lsqflow/io/run.hpp"
#include "lsqflow/io/serialize.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace lsqflow;
  CLI::App app{"Distributed least-squares flow solver: analysis and simulation of network flows"};
  app.require_subcommand(1, 1);

  std::string config_path;
  io::RunOptions options;
  std::string out_dir;
  std::string plot;

  for (const char* name : {"analyze", "solve-lsq", "simulate-ct", "simulate-dt", "simulate-switching",
                           "epsilon-star", "graph-feasibility"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--plot", plot, "series to plot: x, v, error, x:i.j, v:i.j");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? io::kExitOk : io::kExitError;
  }

  const std::string mode_name = app.get_subcommands().front()->get_name();
  if (!out_dir.empty()) options.out_dir = out_dir;
  if (!plot.empty()) options.plot = plot;

  try {
    const io::RunConfig config = io::load_config(config_path, io::parse_mode(mode_name));
    return io::run(config, options, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << io::error_envelope(e);
    return io::kExitError;
  }
}
