#pragma once

// Run driver behind the command-line tool.  A run lives in its own
// directory (config output_dir) holding config.json, diagnostics.csv,
// checkpoint.dat and snapshots/snap_<k>.dat.  The driver advances the
// isospectral midpoint stepper with a fixed step dt = dt_over_hbar *
// hbar(n); every dt_out (snapped to a whole number of steps) it writes a
// snapshot, appends a diagnostics row, and overwrites the checkpoint.
// Runs are single-threaded and deterministic: rerunning a config, or
// interrupting and resuming, reproduces the output files bit for bit.

#include <string>

#include "mhd/store.hpp"

namespace mhd {

// Creates the run directory named by the config and writes config.json.
// Idempotent; refuses if the directory holds a different config.
int cmd_init(const std::string& config_file);

// Runs the simulation described by config_file, or with resume = true
// continues from the run directory's checkpoint.  A fresh run refuses to
// start over an existing checkpoint; a resume refuses when n, nu,
// dt_over_hbar or dt_out differ from the stored config (simtime may be
// extended).  On a stage-solver failure the last good state is
// checkpointed and the error reports the failing step index.
int cmd_run(const std::string& config_file, bool resume);

// Renders snapshot `index` (-1 = last) as a Hammer-projection PPM of the
// synthesized vorticity.  Empty out_path defaults to
// <run_dir>/plot_<index>.ppm.  With global_scale the color scale is the
// max |vorticity| over all snapshots instead of the plotted one.
int cmd_plot(const std::string& run_dir, long index, const std::string& out_path,
             int width, bool global_scale);

// Writes "ell,enstrophy_ell" rows for snapshot `index` plus a trailing
// summary comment with the tail enstrophy above ell_star and the implied
// per-mode noise level.  ell_star = 0 uses elmax from the stored config;
// empty out_csv writes to stdout.
int cmd_spectrum(const std::string& run_dir, long index, int ell_star,
                 const std::string& out_csv);

}  // namespace mhd
