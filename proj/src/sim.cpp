#include "mhd/sim.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mhd/basis.hpp"
#include "mhd/diagnostics.hpp"
#include "mhd/integrators.hpp"
#include "mhd/rng.hpp"
#include "mhd/spheregrid.hpp"

namespace mhd {

namespace {

struct Cadence {
  long steps_per_out = 1;  // dt_out snapped to this many steps
  long n_out = 1;          // output count including the initial state
  double dt = 0.0;
};

Cadence compute_cadence(const SimulationConfig& cfg) {
  Cadence cad;
  cad.dt = cfg.dt_over_hbar * hbar(cfg.n);
  cad.steps_per_out = std::llround(cfg.dt_out / cad.dt);
  if (cad.steps_per_out < 1) cad.steps_per_out = 1;
  const double snapped = static_cast<double>(cad.steps_per_out) * cad.dt;
  if (std::abs(snapped - cfg.dt_out) > 1e-9 * std::max(cfg.dt_out, cad.dt))
    std::fprintf(stderr, "note: dt_out %.9g snapped to %ld steps of %.9g = %.9g\n",
                 cfg.dt_out, cad.steps_per_out, cad.dt, snapped);
  cad.n_out = static_cast<long>(std::floor(cfg.simtime / cfg.dt_out + 1e-9)) + 1;
  return cad;
}

// Name of the first differing field, or "" if equivalent.  With
// dynamics_only, fields a resume is allowed to change are skipped.
std::string first_mismatch(const SimulationConfig& a, const SimulationConfig& b,
                           bool dynamics_only) {
  if (a.n != b.n) return "n";
  if (a.nu != b.nu) return "nu";
  if (a.dt_over_hbar != b.dt_over_hbar) return "dt_over_hbar";
  if (a.dt_out != b.dt_out) return "dt_out";
  if (dynamics_only) return "";
  if (a.elmax != b.elmax) return "elmax";
  if (a.seed != b.seed) return "seed";
  if (a.simtime != b.simtime) return "simtime";
  if (a.zero_momentum != b.zero_momentum) return "zero_momentum";
  if (a.output_dir != b.output_dir) return "output_dir";
  return "";
}

// Writes config.json if absent, else insists the stored one matches.
void adopt_run_config(const SimulationConfig& cfg) {
  const std::string path = config_path(cfg.output_dir);
  if (std::filesystem::exists(path)) {
    const std::string field = first_mismatch(load_config(path), cfg, false);
    if (!field.empty())
      throw std::runtime_error(
          "run directory holds a different config (field '" + field + "')");
  } else {
    save_config(cfg, path);
  }
}

void checkpoint_state(const std::string& run_dir, int n, double time, long step,
                      const CMat& w) {
  Checkpoint chk;
  chk.n = n;
  chk.time = time;
  chk.step = static_cast<std::uint64_t>(step);
  chk.w = w;
  const std::string path = checkpoint_path(run_dir);
  write_checkpoint(path + ".tmp", chk);
  std::filesystem::rename(path + ".tmp", path);
}

struct Driver {
  SimulationConfig cfg;
  Cadence cad;
  QuantizedLaplacian lap;
  QuantBasis basis;
  StepperConfig scfg;
  std::ofstream csv;
  CMat w;
  long step = 0;

  Driver(const SimulationConfig& config, const Cadence& cadence)
      : cfg(config),
        cad(cadence),
        lap(build_quantized_laplacian(config.n)),
        basis(build_basis(lap)) {
    scfg.eps = cfg.dt_over_hbar;
    scfg.nu = cfg.nu;
  }

  // Snapshot k, diagnostics row, checkpoint; in that order, so on a crash
  // the checkpoint never runs ahead of the other files.
  void write_output(long k, int fp_iters) {
    const double time = static_cast<double>(step) * cad.dt;
    Snapshot snap;
    snap.n = cfg.n;
    snap.index = static_cast<std::uint32_t>(k);
    snap.time = time;
    snap.coeffs = mat2shr(basis, w);
    write_snapshot(snapshot_path(cfg.output_dir, snap.index), snap);

    csv << format_diagnostics_row(compute_diagnostics(lap, basis, w, time, fp_iters))
        << "\n";
    csv.flush();
    checkpoint_state(cfg.output_dir, cfg.n, time, step, w);
  }

  void advance_to(long total_steps) {
    while (step < total_steps) {
      const long k = step / cad.steps_per_out + 1;
      const long boundary = k * cad.steps_per_out;
      int max_iters = 0;
      while (step < boundary) {
        StepInfo info;
        CMat next;
        try {
          next = hyperviscous_step(lap, w, scfg, &info);
        } catch (const std::exception& e) {
          checkpoint_state(cfg.output_dir, cfg.n,
                           static_cast<double>(step) * cad.dt, step, w);
          throw std::runtime_error("cmd_run: aborted at step " +
                                   std::to_string(step + 1) + ": " + e.what());
        }
        w = std::move(next);
        ++step;
        max_iters = std::max(max_iters, info.fp_iters);
      }
      write_output(k, max_iters);
    }
  }
};

std::uint32_t resolve_index(const std::string& run_dir, long index) {
  const std::uint32_t count = count_snapshots(run_dir);
  if (count == 0) throw std::runtime_error("no snapshots in " + run_dir);
  if (index == -1) return count - 1;
  if (index < 0) throw std::invalid_argument("snapshot index must be >= 0 or -1");
  if (index >= static_cast<long>(count))
    throw std::runtime_error("snapshot " + std::to_string(index) + " not found (run has " +
                             std::to_string(count) + ")");
  return static_cast<std::uint32_t>(index);
}

LatLonGrid synthesize_snapshot(const Snapshot& snap) {
  const int n_lat = std::max(128, snap.n);
  return synthesize(snap.coeffs, n_lat, 2 * n_lat);
}

}  // namespace

int cmd_init(const std::string& config_file) {
  SimulationConfig cfg = load_config(config_file);
  make_run_dirs(cfg.output_dir);
  RunLock lock(cfg.output_dir);
  adopt_run_config(cfg);
  return 0;
}

int cmd_run(const std::string& config_file, bool resume) {
  SimulationConfig cfg = load_config(config_file);
  const Cadence cad = compute_cadence(cfg);
  const std::string run_dir = cfg.output_dir;
  const long total_steps = (cad.n_out - 1) * cad.steps_per_out;

  make_run_dirs(run_dir);
  RunLock lock(run_dir);
  Driver d(cfg, cad);

  if (!resume) {
    if (std::filesystem::exists(checkpoint_path(run_dir)))
      throw std::runtime_error("cmd_run: " + checkpoint_path(run_dir) +
                               " exists; pass --resume or use a fresh output_dir");
    adopt_run_config(cfg);
    d.w = shr2mat(d.basis,
                  make_initial_coeffs(cfg.n, cfg.elmax, cfg.seed, cfg.zero_momentum));
    d.step = 0;
    d.csv.open(diagnostics_path(run_dir), std::ios::trunc);
    if (!d.csv)
      throw std::runtime_error("cmd_run: cannot open " + diagnostics_path(run_dir));
    d.csv << diagnostics_csv_header() << "\n";
    d.write_output(0, 0);
  } else {
    if (!std::filesystem::exists(checkpoint_path(run_dir)))
      throw std::runtime_error("cmd_run: no checkpoint to resume in " + run_dir);
    Checkpoint chk = read_checkpoint(checkpoint_path(run_dir));
    const std::string field =
        first_mismatch(load_config(config_path(run_dir)), cfg, true);
    if (!field.empty())
      throw std::runtime_error("cmd_run: cannot resume, config field '" + field +
                               "' differs from the stored run");
    if (chk.n != cfg.n)
      throw std::runtime_error("cmd_run: checkpoint matrix size differs from config");
    if (std::abs(chk.time - static_cast<double>(chk.step) * cad.dt) >
        1e-9 * std::max(1.0, chk.time))
      throw std::runtime_error(
          "cmd_run: checkpoint time inconsistent with the configured step");

    const long done = static_cast<long>(chk.step);
    const long rows_expected = done / cad.steps_per_out + 1;
    if (static_cast<long>(read_diagnostics_csv(diagnostics_path(run_dir)).size()) !=
        rows_expected)
      throw std::runtime_error(
          "cmd_run: diagnostics.csv row count inconsistent with checkpoint");
    if (static_cast<long>(count_snapshots(run_dir)) != rows_expected)
      throw std::runtime_error("cmd_run: snapshot count inconsistent with checkpoint");
    if (done >= total_steps) {
      std::fprintf(stderr, "cmd_run: checkpoint already at simtime; nothing to do\n");
      return 0;
    }
    d.w = std::move(chk.w);
    d.step = done;
    d.csv.open(diagnostics_path(run_dir), std::ios::app);
    if (!d.csv)
      throw std::runtime_error("cmd_run: cannot open " + diagnostics_path(run_dir));
  }

  d.advance_to(total_steps);
  return 0;
}

int cmd_plot(const std::string& run_dir, long index, const std::string& out_path,
             int width, bool global_scale) {
  const std::uint32_t idx = resolve_index(run_dir, index);
  const Snapshot snap = read_snapshot(snapshot_path(run_dir, idx));
  const LatLonGrid grid = synthesize_snapshot(snap);

  double vmax = 0.0;
  if (global_scale) {
    const std::uint32_t count = count_snapshots(run_dir);
    for (std::uint32_t k = 0; k < count; ++k) {
      const LatLonGrid g = k == idx
                               ? grid
                               : synthesize_snapshot(read_snapshot(snapshot_path(run_dir, k)));
      vmax = std::max(vmax, g.values.cwiseAbs().maxCoeff());
    }
  }

  const RasterImage img = render_hammer(grid, width, vmax);
  const std::string out =
      out_path.empty() ? run_dir + "/plot_" + std::to_string(idx) + ".ppm" : out_path;
  write_ppm(out, img);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_spectrum(const std::string& run_dir, long index, int ell_star,
                 const std::string& out_csv) {
  const std::uint32_t idx = resolve_index(run_dir, index);
  const Snapshot snap = read_snapshot(snapshot_path(run_dir, idx));
  const int n = snap.n;

  SpectrumReport rep;
  rep.per_ell = RVec::Zero(n);
  for (int ell = 1; ell < n; ++ell)
    for (int m = -ell; m <= ell; ++m) {
      const double c = snap.coeffs[ell * ell + ell + m];
      rep.per_ell[ell] += c * c;
    }
  if (ell_star == 0) ell_star = load_config(config_path(run_dir)).elmax;
  noise_level(rep, ell_star, n);

  std::ostringstream text;
  text << "ell,enstrophy_ell\n";
  char buf[40];
  for (int ell = 1; ell < n; ++ell) {
    std::snprintf(buf, sizeof buf, "%.17g", rep.per_ell[ell]);
    text << ell << "," << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "%.17g", rep.tail_enstrophy);
  text << "# ell_star=" << rep.ell_star << " tail_enstrophy=" << buf;
  std::snprintf(buf, sizeof buf, "%.17g", rep.noise_level);
  text << " noise_level=" << buf << "\n";

  if (out_csv.empty()) {
    std::fputs(text.str().c_str(), stdout);
  } else {
    std::ofstream os(out_csv);
    if (!os) throw std::runtime_error("cmd_spectrum: cannot open " + out_csv);
    os << text.str();
    if (!os) throw std::runtime_error("cmd_spectrum: write failed for " + out_csv);
  }
  return 0;
}

}  // namespace mhd
