#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "mhd/sim.hpp"

int main(int argc, char** argv) {
  CLI::App app{"mhd: isospectral midpoint simulator for Euler-Zeitlin flow on the sphere"};
  app.require_subcommand(1);

  std::string config_file;
  std::string run_dir;
  std::string out_path;
  bool resume = false;
  bool deterministic = false;
  bool global_scale = false;
  long index = -1;
  int width = 800;
  int ell_star = 0;

  CLI::App* init = app.add_subcommand("init", "create a run directory from a config");
  init->add_option("config", config_file, "JSON configuration file")->required();

  CLI::App* run = app.add_subcommand("run", "run or resume a simulation");
  run->add_option("config", config_file, "JSON configuration file")->required();
  run->add_flag("--resume", resume, "continue from the run directory's checkpoint");
  run->add_flag("--deterministic", deterministic,
                "single-threaded reproducible mode (always on; flag kept for scripts)");

  CLI::App* plot = app.add_subcommand("plot", "render a snapshot as a Hammer-projection PPM");
  plot->add_option("run_dir", run_dir, "run directory")->required();
  plot->add_option("-t,--index", index, "snapshot index, -1 = last");
  plot->add_option("-o,--out", out_path, "output file (default <run_dir>/plot_<idx>.ppm)");
  plot->add_option("--width", width, "image width in pixels (even, height = width/2)");
  plot->add_flag("--global-scale", global_scale, "color scale from all snapshots");

  CLI::App* spectrum = app.add_subcommand("spectrum", "export per-ell enstrophy components");
  spectrum->add_option("run_dir", run_dir, "run directory")->required();
  spectrum->add_option("-t,--index", index, "snapshot index, -1 = last");
  spectrum->add_option("--ell-star", ell_star, "tail split wavenumber (default: config elmax)");
  spectrum->add_option("-o,--out", out_path, "output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);
  (void)deterministic;  // runs are always deterministic; see README

  try {
    if (*init) return mhd::cmd_init(config_file);
    if (*run) return mhd::cmd_run(config_file, resume);
    if (*plot) return mhd::cmd_plot(run_dir, index, out_path, width, global_scale);
    if (*spectrum) return mhd::cmd_spectrum(run_dir, index, ell_star, out_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mhd: %s\n", e.what());
    return 1;
  }
  return 0;
}
