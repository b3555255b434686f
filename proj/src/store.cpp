#include "mhd/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mhd {

namespace {

// ---- little-endian primitives ----

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}

void put_f64(std::ostream& os, double v) {
  put_u64(os, std::bit_cast<std::uint64_t>(v));
}

void get_bytes(std::istream& is, char* b, std::streamsize k, const char* what) {
  is.read(b, k);
  if (is.gcount() != k) throw std::runtime_error(std::string(what) + ": truncated file");
}

std::uint32_t get_u32(std::istream& is, const char* what) {
  char b[4];
  get_bytes(is, b, 4, what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& is, const char* what) {
  char b[8];
  get_bytes(is, b, 8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}

double get_f64(std::istream& is, const char* what) {
  return std::bit_cast<double>(get_u64(is, what));
}

void expect_magic(std::istream& is, const char* magic, const char* what) {
  char b[4];
  get_bytes(is, b, 4, what);
  if (std::string_view(b, 4) != std::string_view(magic, 4))
    throw std::runtime_error(std::string(what) + ": bad magic");
}

void expect_eof(std::istream& is, const char* what) {
  if (is.peek() != std::char_traits<char>::eof())
    throw std::runtime_error(std::string(what) + ": trailing bytes");
}

// Guards allocations when reading corrupt headers.
constexpr int kMaxN = 16384;

int checked_n(std::uint32_t raw, const char* what) {
  if (raw < 2 || raw > kMaxN)
    throw std::runtime_error(std::string(what) + ": implausible matrix size in header");
  return static_cast<int>(raw);
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---- configuration ----

void validate_config(const SimulationConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("config: n must be >= 2");
  if (cfg.elmax < 1 || cfg.elmax > cfg.n - 1)
    throw std::invalid_argument("config: requires 1 <= elmax <= n-1");
  if (!(cfg.dt_over_hbar > 0.0) || !std::isfinite(cfg.dt_over_hbar))
    throw std::invalid_argument("config: dt_over_hbar must be positive");
  if (!(cfg.simtime > 0.0) || !std::isfinite(cfg.simtime))
    throw std::invalid_argument("config: simtime must be positive");
  if (!(cfg.dt_out > 0.0) || cfg.dt_out > cfg.simtime)
    throw std::invalid_argument("config: requires 0 < dt_out <= simtime");
  if (!(cfg.nu >= 0.0) || !std::isfinite(cfg.nu))
    throw std::invalid_argument("config: nu must be >= 0");
  if (cfg.output_dir.empty())
    throw std::invalid_argument("config: output_dir must be nonempty");
}

SimulationConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: root must be a JSON object");

  static const char* known[] = {"n",       "elmax", "seed",          "dt_over_hbar",
                                "simtime", "dt_out", "nu",           "zero_momentum",
                                "output_dir"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw std::invalid_argument("config: unknown key '" + item.key() + "'");
  }
  for (const char* k : {"n", "elmax", "simtime", "dt_out", "output_dir"})
    if (!j.contains(k))
      throw std::invalid_argument(std::string("config: missing key '") + k + "'");

  auto get_int = [&j](const char* key) -> int {
    const auto& v = j.at(key);
    if (!v.is_number_integer())
      throw std::invalid_argument(std::string("config: '") + key + "' must be an integer");
    return v.get<int>();
  };
  auto get_real = [&j](const char* key, double fallback) -> double {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (!v.is_number())
      throw std::invalid_argument(std::string("config: '") + key + "' must be a number");
    return v.get<double>();
  };

  SimulationConfig cfg;
  cfg.n = get_int("n");
  cfg.elmax = get_int("elmax");
  cfg.simtime = get_real("simtime", 0.0);
  cfg.dt_out = get_real("dt_out", 0.0);
  cfg.dt_over_hbar = get_real("dt_over_hbar", cfg.dt_over_hbar);
  cfg.nu = get_real("nu", cfg.nu);
  if (j.contains("seed")) {
    const auto& v = j.at("seed");
    if (v.is_number_unsigned()) {
      cfg.seed = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      cfg.seed = static_cast<std::uint64_t>(v.get<std::int64_t>());
    } else {
      throw std::invalid_argument("config: 'seed' must be a nonnegative integer");
    }
  }
  if (j.contains("zero_momentum")) {
    const auto& v = j.at("zero_momentum");
    if (!v.is_boolean())
      throw std::invalid_argument("config: 'zero_momentum' must be a boolean");
    cfg.zero_momentum = v.get<bool>();
  }
  {
    const auto& v = j.at("output_dir");
    if (!v.is_string())
      throw std::invalid_argument("config: 'output_dir' must be a string");
    cfg.output_dir = v.get<std::string>();
  }

  validate_config(cfg);
  return cfg;
}

SimulationConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_config: cannot open " + path);
  std::ostringstream text;
  text << is.rdbuf();
  return parse_config(text.str());
}

void save_config(const SimulationConfig& cfg, const std::string& path) {
  nlohmann::ordered_json j;
  j["n"] = cfg.n;
  j["elmax"] = cfg.elmax;
  j["seed"] = cfg.seed;
  j["dt_over_hbar"] = cfg.dt_over_hbar;
  j["simtime"] = cfg.simtime;
  j["dt_out"] = cfg.dt_out;
  j["nu"] = cfg.nu;
  j["zero_momentum"] = cfg.zero_momentum;
  j["output_dir"] = cfg.output_dir;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_config: cannot open " + path);
  os << j.dump(2) << "\n";
  if (!os) throw std::runtime_error("save_config: write failed for " + path);
}

// ---- snapshots and checkpoints ----

void write_snapshot(const std::string& path, const Snapshot& snap) {
  const long n = snap.n;
  if (n < 2) throw std::invalid_argument("write_snapshot: n must be >= 2");
  if (snap.coeffs.size() != n * n)
    throw std::invalid_argument("write_snapshot: coefficient count must be n^2");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_snapshot: cannot open " + path);
  os.write("MHS1", 4);
  put_u32(os, static_cast<std::uint32_t>(n));
  put_u32(os, snap.index);
  put_f64(os, snap.time);
  put_u64(os, static_cast<std::uint64_t>(n * n));
  for (long k = 0; k < n * n; ++k) put_f64(os, snap.coeffs[k]);
  if (!os) throw std::runtime_error("write_snapshot: write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);
  expect_magic(is, "MHS1", "read_snapshot");

  Snapshot snap;
  snap.n = checked_n(get_u32(is, "read_snapshot"), "read_snapshot");
  snap.index = get_u32(is, "read_snapshot");
  snap.time = get_f64(is, "read_snapshot");
  const std::uint64_t count = get_u64(is, "read_snapshot");
  const long nn = static_cast<long>(snap.n) * snap.n;
  if (count != static_cast<std::uint64_t>(nn))
    throw std::runtime_error("read_snapshot: count does not match n^2");
  snap.coeffs.resize(nn);
  for (long k = 0; k < nn; ++k) snap.coeffs[k] = get_f64(is, "read_snapshot");
  expect_eof(is, "read_snapshot");
  return snap;
}

void write_checkpoint(const std::string& path, const Checkpoint& chk) {
  const long n = chk.n;
  if (n < 2) throw std::invalid_argument("write_checkpoint: n must be >= 2");
  if (chk.w.rows() != n || chk.w.cols() != n)
    throw std::invalid_argument("write_checkpoint: matrix must be n x n");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_checkpoint: cannot open " + path);
  os.write("MHC1", 4);
  put_u32(os, static_cast<std::uint32_t>(n));
  put_f64(os, chk.time);
  put_u64(os, chk.step);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      put_f64(os, chk.w(i, j).real());
      put_f64(os, chk.w(i, j).imag());
    }
  if (!os) throw std::runtime_error("write_checkpoint: write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_checkpoint: cannot open " + path);
  expect_magic(is, "MHC1", "read_checkpoint");

  Checkpoint chk;
  chk.n = checked_n(get_u32(is, "read_checkpoint"), "read_checkpoint");
  chk.time = get_f64(is, "read_checkpoint");
  chk.step = get_u64(is, "read_checkpoint");
  chk.w.resize(chk.n, chk.n);
  for (int i = 0; i < chk.n; ++i)
    for (int j = 0; j < chk.n; ++j) {
      const double re = get_f64(is, "read_checkpoint");
      const double im = get_f64(is, "read_checkpoint");
      chk.w(i, j) = cplx(re, im);
    }
  expect_eof(is, "read_checkpoint");
  return chk;
}

// ---- diagnostics CSV ----

const std::string& diagnostics_csv_header() {
  static const std::string header =
      "time,energy,enstrophy,casimir3,casimir4,mom_x,mom_y,mom_z,fp_iters";
  return header;
}

std::string format_diagnostics_row(const DiagnosticsRecord& rec) {
  std::string row = g17(rec.time);
  for (double v : {rec.energy, rec.enstrophy, rec.casimir3, rec.casimir4,
                   rec.momentum[0], rec.momentum[1], rec.momentum[2]})
    row += "," + g17(v);
  row += "," + std::to_string(rec.fp_iters);
  return row;
}

std::vector<DiagnosticsRecord> read_diagnostics_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("read_diagnostics_csv: cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != diagnostics_csv_header())
    throw std::runtime_error("read_diagnostics_csv: bad header in " + path);

  std::vector<DiagnosticsRecord> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    DiagnosticsRecord rec;
    long iters = 0;
    const int got = std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%ld",
                                &rec.time, &rec.energy, &rec.enstrophy, &rec.casimir3,
                                &rec.casimir4, &rec.momentum[0], &rec.momentum[1],
                                &rec.momentum[2], &iters);
    if (got != 9)
      throw std::runtime_error("read_diagnostics_csv: malformed row in " + path);
    rec.fp_iters = iters;
    rows.push_back(rec);
  }
  return rows;
}

// ---- run directory layout ----

std::string config_path(const std::string& run_dir) { return run_dir + "/config.json"; }

std::string diagnostics_path(const std::string& run_dir) {
  return run_dir + "/diagnostics.csv";
}

std::string checkpoint_path(const std::string& run_dir) {
  return run_dir + "/checkpoint.dat";
}

std::string snapshot_path(const std::string& run_dir, std::uint32_t index) {
  return run_dir + "/snapshots/snap_" + std::to_string(index) + ".dat";
}

void make_run_dirs(const std::string& run_dir) {
  std::error_code ec;
  std::filesystem::create_directories(run_dir + "/snapshots", ec);
  if (ec)
    throw std::runtime_error("make_run_dirs: cannot create " + run_dir + ": " +
                             ec.message());
}

std::uint32_t count_snapshots(const std::string& run_dir) {
  std::uint32_t k = 0;
  while (std::filesystem::exists(snapshot_path(run_dir, k))) ++k;
  return k;
}

// ---- single-writer lock ----

RunLock::RunLock(const std::string& run_dir) : path_(run_dir + "/.lock") {
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST)
      throw std::runtime_error("RunLock: " + path_ +
                               " exists; another writer owns this run directory");
    throw std::runtime_error("RunLock: cannot create " + path_);
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  ssize_t ignored = ::write(fd, pid.data(), pid.size());
  (void)ignored;
  ::close(fd);
}

RunLock::~RunLock() { ::unlink(path_.c_str()); }

}  // namespace mhd
