#pragma once

// Run-directory persistence: configuration, snapshots, checkpoints,
// diagnostics CSV, and a single-writer lock.
//
// A run directory holds config.json, diagnostics.csv, checkpoint.dat and
// snapshots/snap_<index>.dat with indices contiguous from 0.  All binary
// fields are little-endian regardless of host byte order:
//   snapshot:   "MHS1" | u32 n | u32 index | f64 time | u64 count = n^2
//               | count x f64 coefficients (flat order k = l^2+l+m)
//   checkpoint: "MHC1" | u32 n | f64 time | u64 step
//               | 2 n^2 x f64 (row-major matrix, re/im interleaved)
// Snapshots store coefficient vectors (compact, basis-independent);
// checkpoints store the raw matrix so restarts are bit-exact.

#include <cstdint>
#include <string>
#include <vector>

#include "mhd/common.hpp"
#include "mhd/diagnostics.hpp"

namespace mhd {

// ---- configuration ----

struct SimulationConfig {
  int n = 0;
  int elmax = 0;
  std::uint64_t seed = 0;
  double dt_over_hbar = 0.2;
  double simtime = 0.0;
  double dt_out = 0.0;
  double nu = 0.0;
  bool zero_momentum = true;
  std::string output_dir;
};

// Throws std::invalid_argument naming the offending field.
void validate_config(const SimulationConfig& cfg);

// Parses a JSON object whose keys are exactly the SimulationConfig field
// names (snake_case).  Unknown keys are rejected; n, elmax, simtime,
// dt_out and output_dir are required, the rest default as above.
// The result is validated.
SimulationConfig parse_config(const std::string& json_text);

SimulationConfig load_config(const std::string& path);
void save_config(const SimulationConfig& cfg, const std::string& path);

// ---- snapshots and checkpoints ----

struct Snapshot {
  int n = 0;
  std::uint32_t index = 0;
  double time = 0.0;
  RVec coeffs;
};

struct Checkpoint {
  int n = 0;
  double time = 0.0;
  std::uint64_t step = 0;
  CMat w;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

void write_checkpoint(const std::string& path, const Checkpoint& chk);
Checkpoint read_checkpoint(const std::string& path);

// ---- diagnostics CSV ----

// "time,energy,enstrophy,casimir3,casimir4,mom_x,mom_y,mom_z,fp_iters"
const std::string& diagnostics_csv_header();

// One CSV line (no trailing newline); doubles printed with %.17g.
std::string format_diagnostics_row(const DiagnosticsRecord& rec);

// Reads a diagnostics CSV, checking the header line.
std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path);

// ---- run directory layout ----

std::string config_path(const std::string& run_dir);
std::string diagnostics_path(const std::string& run_dir);
std::string checkpoint_path(const std::string& run_dir);
std::string snapshot_path(const std::string& run_dir, std::uint32_t index);

// Creates run_dir and run_dir/snapshots (parents included).
void make_run_dirs(const std::string& run_dir);

// Number of contiguous snapshots snap_0 .. snap_{k-1} present.
std::uint32_t count_snapshots(const std::string& run_dir);

// ---- single-writer lock ----

// Creates run_dir/.lock exclusively on construction (throws
// std::runtime_error if it already exists) and removes it on destruction.
class RunLock {
 public:
  explicit RunLock(const std::string& run_dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::string path_;
};

}  // namespace mhd
