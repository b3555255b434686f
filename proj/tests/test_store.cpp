#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mhd/store.hpp"
#include "oracles.hpp"

using namespace mhd;

namespace {

struct TempDir {
  std::string path;
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "mhd_test_XXXXXX").string();
    const char* made = mkdtemp(tmpl.data());
    REQUIRE(made != nullptr);
    path = made;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

std::string read_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  REQUIRE(os.good());
}

const char* kFullConfig = R"({
  "n": 16,
  "elmax": 5,
  "seed": 42,
  "dt_over_hbar": 0.1,
  "simtime": 2.0,
  "dt_out": 0.5,
  "nu": 0.001,
  "zero_momentum": false,
  "output_dir": "runs/demo"
})";

}  // namespace

TEST_CASE("store: config parsing") {
  SUBCASE("full object") {
    SimulationConfig cfg = parse_config(kFullConfig);
    CHECK(cfg.n == 16);
    CHECK(cfg.elmax == 5);
    CHECK(cfg.seed == 42);
    CHECK(cfg.dt_over_hbar == 0.1);
    CHECK(cfg.simtime == 2.0);
    CHECK(cfg.dt_out == 0.5);
    CHECK(cfg.nu == 0.001);
    CHECK(cfg.zero_momentum == false);
    CHECK(cfg.output_dir == "runs/demo");
  }

  SUBCASE("defaults for omitted optional keys") {
    SimulationConfig cfg = parse_config(
        R"({"n": 8, "elmax": 3, "simtime": 1.0, "dt_out": 0.25, "output_dir": "r"})");
    CHECK(cfg.seed == 0);
    CHECK(cfg.dt_over_hbar == 0.2);
    CHECK(cfg.nu == 0.0);
    CHECK(cfg.zero_momentum == true);
  }

  SUBCASE("unknown key rejected") {
    CHECK_THROWS_AS(parse_config(R"({"n": 8, "elmax": 3, "simtime": 1.0,
        "dt_out": 0.25, "output_dir": "r", "extra": 1})"),
                    std::invalid_argument);
  }

  SUBCASE("missing required key rejected") {
    CHECK_THROWS_AS(parse_config(R"({"n": 8, "elmax": 3, "simtime": 1.0, "dt_out": 0.25})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"elmax": 3, "simtime": 1.0, "dt_out": 0.25,
        "output_dir": "r"})"),
                    std::invalid_argument);
  }

  SUBCASE("type errors rejected") {
    CHECK_THROWS_AS(parse_config(R"({"n": 8.5, "elmax": 3, "simtime": 1.0,
        "dt_out": 0.25, "output_dir": "r"})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"n": 8, "elmax": 3, "simtime": 1.0,
        "dt_out": 0.25, "output_dir": "r", "zero_momentum": "yes"})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(R"({"n": 8, "elmax": 3, "simtime": 1.0,
        "dt_out": 0.25, "output_dir": "r", "seed": -1})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config("not json"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[1,2,3]"), std::invalid_argument);
  }

  SUBCASE("invariant violations rejected") {
    auto with = [](const char* patch) {
      return std::string(R"({"output_dir": "r",)") + patch + "}";
    };
    CHECK_THROWS_AS(parse_config(with(R"("n": 1, "elmax": 1, "simtime": 1, "dt_out": 1)")),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(with(R"("n": 8, "elmax": 0, "simtime": 1, "dt_out": 1)")),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(with(R"("n": 8, "elmax": 8, "simtime": 1, "dt_out": 1)")),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config(with(R"("n": 8, "elmax": 3, "simtime": 0, "dt_out": 1)")),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        parse_config(with(R"("n": 8, "elmax": 3, "simtime": 1, "dt_out": 2)")),
        std::invalid_argument);
    CHECK_THROWS_AS(
        parse_config(with(R"("n": 8, "elmax": 3, "simtime": 1, "dt_out": 0.5, "nu": -1)")),
        std::invalid_argument);
    CHECK_THROWS_AS(parse_config(with(
                        R"("n": 8, "elmax": 3, "simtime": 1, "dt_out": 0.5,
                           "dt_over_hbar": 0)")),
                    std::invalid_argument);
  }

  SUBCASE("empty output_dir rejected") {
    CHECK_THROWS_AS(parse_config(R"({"n": 8, "elmax": 3, "simtime": 1.0,
        "dt_out": 0.25, "output_dir": ""})"),
                    std::invalid_argument);
  }
}

TEST_CASE("store: config save/load roundtrip") {
  TempDir dir;
  SimulationConfig cfg = parse_config(kFullConfig);
  const std::string path = dir.path + "/config.json";
  save_config(cfg, path);
  SimulationConfig back = load_config(path);
  CHECK(back.n == cfg.n);
  CHECK(back.elmax == cfg.elmax);
  CHECK(back.seed == cfg.seed);
  CHECK(back.dt_over_hbar == cfg.dt_over_hbar);
  CHECK(back.simtime == cfg.simtime);
  CHECK(back.dt_out == cfg.dt_out);
  CHECK(back.nu == cfg.nu);
  CHECK(back.zero_momentum == cfg.zero_momentum);
  CHECK(back.output_dir == cfg.output_dir);

  CHECK_THROWS_AS(load_config(dir.path + "/absent.json"), std::runtime_error);
}

TEST_CASE("store: snapshot roundtrip and validation") {
  TempDir dir;
  oracle::Rand rnd(3);
  Snapshot snap;
  snap.n = 8;
  snap.index = 5;
  snap.time = 1.25;
  snap.coeffs.resize(64);
  for (long k = 0; k < 64; ++k) snap.coeffs[k] = rnd.sym();

  const std::string path = dir.path + "/snap.dat";
  write_snapshot(path, snap);

  SUBCASE("fields and payload are bit-exact") {
    Snapshot back = read_snapshot(path);
    CHECK(back.n == 8);
    CHECK(back.index == 5);
    CHECK(back.time == 1.25);
    REQUIRE(back.coeffs.size() == 64);
    CHECK((back.coeffs.array() == snap.coeffs.array()).all());
  }

  SUBCASE("rewrite produces identical bytes") {
    const std::string first = read_bytes(path);
    write_snapshot(path, snap);
    CHECK(read_bytes(path) == first);
    CHECK(first.size() == 4 + 4 + 4 + 8 + 8 + 64 * 8);
    CHECK(first.substr(0, 4) == "MHS1");
  }

  SUBCASE("corrupt files rejected") {
    std::string bytes = read_bytes(path);

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    write_bytes(dir.path + "/bad_magic.dat", bad_magic);
    CHECK_THROWS_AS(read_snapshot(dir.path + "/bad_magic.dat"), std::runtime_error);

    write_bytes(dir.path + "/short.dat", bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_snapshot(dir.path + "/short.dat"), std::runtime_error);

    write_bytes(dir.path + "/long.dat", bytes + "!");
    CHECK_THROWS_AS(read_snapshot(dir.path + "/long.dat"), std::runtime_error);

    std::string bad_count = bytes;
    bad_count[12 + 8] = 63;  // count field low byte: 64 -> 63
    write_bytes(dir.path + "/bad_count.dat", bad_count);
    CHECK_THROWS_AS(read_snapshot(dir.path + "/bad_count.dat"), std::runtime_error);

    CHECK_THROWS_AS(read_snapshot(dir.path + "/absent.dat"), std::runtime_error);
  }

  SUBCASE("writer validation") {
    Snapshot bad = snap;
    bad.coeffs.resize(63);
    CHECK_THROWS_AS(write_snapshot(path, bad), std::invalid_argument);
    bad.n = 1;
    CHECK_THROWS_AS(write_snapshot(path, bad), std::invalid_argument);
    CHECK_THROWS_AS(write_snapshot(dir.path + "/no_dir/x.dat", snap), std::runtime_error);
  }
}

TEST_CASE("store: checkpoint roundtrip and validation") {
  TempDir dir;
  Checkpoint chk;
  chk.n = 6;
  chk.time = 0.75;
  chk.step = 1234567890123ull;
  chk.w = oracle::random_complex(6, 17);

  const std::string path = dir.path + "/checkpoint.dat";
  write_checkpoint(path, chk);

  SUBCASE("fields and payload are bit-exact") {
    Checkpoint back = read_checkpoint(path);
    CHECK(back.n == 6);
    CHECK(back.time == 0.75);
    CHECK(back.step == chk.step);
    CHECK((back.w.array() == chk.w.array()).all());
  }

  SUBCASE("rewrite produces identical bytes") {
    const std::string first = read_bytes(path);
    write_checkpoint(path, chk);
    CHECK(read_bytes(path) == first);
    CHECK(first.size() == 4 + 4 + 8 + 8 + 2 * 36 * 8);
    CHECK(first.substr(0, 4) == "MHC1");
  }

  SUBCASE("corrupt files rejected") {
    std::string bytes = read_bytes(path);
    std::string bad_magic = bytes;
    bad_magic[3] = '2';
    write_bytes(dir.path + "/bad.dat", bad_magic);
    CHECK_THROWS_AS(read_checkpoint(dir.path + "/bad.dat"), std::runtime_error);
    write_bytes(dir.path + "/short.dat", bytes.substr(0, 40));
    CHECK_THROWS_AS(read_checkpoint(dir.path + "/short.dat"), std::runtime_error);
    write_bytes(dir.path + "/long.dat", bytes + "??");
    CHECK_THROWS_AS(read_checkpoint(dir.path + "/long.dat"), std::runtime_error);
  }

  SUBCASE("writer validation") {
    Checkpoint bad = chk;
    bad.w.resize(5, 6);
    CHECK_THROWS_AS(write_checkpoint(path, bad), std::invalid_argument);
  }
}

TEST_CASE("store: diagnostics CSV") {
  SUBCASE("header constant") {
    CHECK(diagnostics_csv_header() ==
          "time,energy,enstrophy,casimir3,casimir4,mom_x,mom_y,mom_z,fp_iters");
  }

  SUBCASE("row formatting of exactly representable values") {
    DiagnosticsRecord rec;
    rec.time = 0.5;
    rec.energy = 1.0;
    rec.enstrophy = 2.25;
    rec.casimir3 = -3.0;
    rec.casimir4 = 4.5;
    rec.momentum = Eigen::Vector3d(0.0, -0.125, 8.0);
    rec.fp_iters = 12;
    CHECK(format_diagnostics_row(rec) == "0.5,1,2.25,-3,4.5,0,-0.125,8,12");
  }

  SUBCASE("file roundtrip is value-exact") {
    TempDir dir;
    const std::string path = dir.path + "/diag.csv";
    oracle::Rand rnd(9);
    std::vector<DiagnosticsRecord> rows(5);
    {
      std::ofstream os(path);
      os << diagnostics_csv_header() << "\n";
      for (int i = 0; i < 5; ++i) {
        DiagnosticsRecord& rec = rows[i];
        rec.time = 0.1 * i;
        rec.energy = rnd.sym();
        rec.enstrophy = rnd.sym();
        rec.casimir3 = rnd.sym();
        rec.casimir4 = rnd.sym();
        rec.momentum = Eigen::Vector3d(rnd.sym(), rnd.sym(), rnd.sym());
        rec.fp_iters = i + 2;
        os << format_diagnostics_row(rec) << "\n";
      }
    }
    std::vector<DiagnosticsRecord> back = read_diagnostics_csv(path);
    REQUIRE(back.size() == 5);
    for (int i = 0; i < 5; ++i) {
      CHECK(back[i].time == rows[i].time);
      CHECK(back[i].energy == rows[i].energy);
      CHECK(back[i].enstrophy == rows[i].enstrophy);
      CHECK(back[i].casimir3 == rows[i].casimir3);
      CHECK(back[i].casimir4 == rows[i].casimir4);
      CHECK(back[i].momentum == rows[i].momentum);
      CHECK(back[i].fp_iters == rows[i].fp_iters);
    }
  }

  SUBCASE("bad header rejected") {
    TempDir dir;
    const std::string path = dir.path + "/diag.csv";
    write_bytes(path, "time,energy\n0,0\n");
    CHECK_THROWS_AS(read_diagnostics_csv(path), std::runtime_error);
  }
}

TEST_CASE("store: run directory layout") {
  TempDir dir;
  const std::string run = dir.path + "/runs/alpha";
  CHECK(config_path(run) == run + "/config.json");
  CHECK(diagnostics_path(run) == run + "/diagnostics.csv");
  CHECK(checkpoint_path(run) == run + "/checkpoint.dat");
  CHECK(snapshot_path(run, 7) == run + "/snapshots/snap_7.dat");

  make_run_dirs(run);
  CHECK(std::filesystem::is_directory(run + "/snapshots"));
  CHECK(count_snapshots(run) == 0);

  Snapshot snap;
  snap.n = 2;
  snap.coeffs = RVec::Zero(4);
  for (std::uint32_t k : {0u, 1u, 3u}) {
    snap.index = k;
    write_snapshot(snapshot_path(run, k), snap);
  }
  CHECK(count_snapshots(run) == 2);  // the gap at index 2 ends the run
}

TEST_CASE("store: run lock") {
  TempDir dir;
  const std::string lock_file = dir.path + "/.lock";
  {
    RunLock lock(dir.path);
    CHECK(std::filesystem::exists(lock_file));
    CHECK_THROWS_AS(RunLock(dir.path), std::runtime_error);
  }
  CHECK(!std::filesystem::exists(lock_file));
  CHECK_NOTHROW(RunLock(dir.path));
}
