#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "icp4d/io.hpp"
#include "icp4d/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace icp4d;

TEST_SUITE_BEGIN("cli");

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("icp4d_cli_test_" + std::to_string(counter++) + "_" +
                                        std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CliResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out_file = scratch / "cli_stdout.txt";
  const fs::path err_file = scratch / "cli_stderr.txt";
  const std::string cmd = std::string(ICP4D_CLI_PATH) + " " + args + " > " + out_file.string() +
                          " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

std::vector<uint8_t> read_bytes(const fs::path& p) {
  const std::string s = slurp(p);
  return std::vector<uint8_t>(s.begin(), s.end());
}

// Label-file pair for one frame: n points, one semantic class per point with
// matching gt/pred instance ids as given.
void write_label_frame(const fs::path& path, const std::vector<uint32_t>& semantic,
                       const std::vector<uint32_t>& instance) {
  Scan scan;
  scan.points.assign(semantic.size(), Point3{});
  scan.semantic = semantic;
  scan.instance = instance;  // unused by write_labels; ids passed separately
  write_labels(scan, instance, path);
}

double stdout_value(const std::string& out, const std::string& key) {
  const std::string needle = key + "=";
  std::istringstream iss(out);
  for (std::string line; std::getline(iss, line);)
    if (line.rfind(needle, 0) == 0) return std::stod(line.substr(needle.size()));
  FAIL("no '", key, "=' line in output:\n", out);
  return 0.0;
}

json manifest_of(const fs::path& dir) { return json::parse(slurp(dir / "manifest.json")); }

}  // namespace

TEST_CASE("cli synth and associate produce labels plus manifest") {
  TempDir tmp;
  const fs::path seq = tmp.path / "seq";
  CliResult r = run_cli("synth --output " + seq.string() + " --frames 6 --bodies 2 --seed 11",
                        tmp.path);
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(seq / "scans" / "000000.i4ds"));
  CHECK(fs::exists(seq / "scans" / "000005.i4ds"));
  CHECK(fs::exists(seq / "gt" / "000005.label"));
  CHECK(fs::exists(seq / "manifest.json"));

  const fs::path out = tmp.path / "run";
  r = run_cli("associate --input " + seq.string() + " --format synth --output " + out.string() +
                  " --seed 11",
              tmp.path);
  REQUIRE(r.exit_code == 0);
  for (int f = 0; f < 6; ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "labels/%06d.label", f);
    CHECK(fs::exists(out / name));
  }

  const json m = manifest_of(out);
  CHECK(m.at("command") == "associate");
  CHECK(m.at("counts").at("frames") == 6);
  CHECK(m.at("counts").contains("static_matches"));
  CHECK(m.at("counts").contains("dynamic_matches"));
  CHECK(m.at("counts").contains("bank_matches"));
  CHECK(m.at("counts").at("fresh_tracks").get<int>() >= 2);
  CHECK(m.at("config").at("matching") == "greedy");
  CHECK(m.at("config").at("seed") == "11");
  CHECK(m.at("inputs").size() == 6);
  CHECK(m.at("timings").contains("total_seconds"));
  CHECK(fs::exists(out / "effective.config"));

  SUBCASE("matching mode lands in the manifest") {
    const fs::path out2 = tmp.path / "run_hungarian";
    r = run_cli("associate --input " + seq.string() + " --format synth --output " +
                    out2.string() + " --matching hungarian",
                tmp.path);
    REQUIRE(r.exit_code == 0);
    CHECK(manifest_of(out2).at("config").at("matching") == "hungarian");
  }
}

TEST_CASE("cli associate runs are deterministic") {
  TempDir tmp;
  const fs::path seq = tmp.path / "seq";
  REQUIRE(run_cli("synth --output " + seq.string() + " --frames 5 --bodies 3 --seed 23",
                  tmp.path)
              .exit_code == 0);

  const fs::path a = tmp.path / "a", b = tmp.path / "b";
  for (const fs::path& out : {a, b})
    REQUIRE(run_cli("associate --input " + seq.string() + " --format synth --output " +
                        out.string() + " --seed 23",
                    tmp.path)
                .exit_code == 0);

  for (int f = 0; f < 5; ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "labels/%06d.label", f);
    CHECK(read_bytes(a / name) == read_bytes(b / name));
  }
  json ma = manifest_of(a), mb = manifest_of(b);
  ma.erase("timings");
  mb.erase("timings");
  CHECK(ma == mb);
  CHECK(slurp(a / "effective.config") == slurp(b / "effective.config"));
}

TEST_CASE("cli evaluate scores ground truth against itself as perfect") {
  TempDir tmp;
  const fs::path seq = tmp.path / "seq";
  REQUIRE(run_cli("synth --output " + seq.string() + " --frames 4 --bodies 2 --seed 3",
                  tmp.path)
              .exit_code == 0);
  const fs::path out = tmp.path / "eval";
  const CliResult r = run_cli("evaluate --gt " + (seq / "gt").string() + " --pred " +
                                  (seq / "gt").string() + " --output " + out.string(),
                              tmp.path);
  REQUIRE(r.exit_code == 0);
  CHECK(stdout_value(r.out, "lstq") == 1.0);
  CHECK(stdout_value(r.out, "s_assoc") == 1.0);
  CHECK(stdout_value(r.out, "id_switches") == 0.0);

  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report.at("lstq") == 1.0);
  CHECK(report.at("fp") == 0);
  CHECK(report.at("fn") == 0);
}

TEST_CASE("cli associate output scores perfectly on a clean sequence") {
  TempDir tmp;
  const fs::path seq = tmp.path / "seq";
  REQUIRE(run_cli("synth --output " + seq.string() +
                      " --frames 6 --bodies 3 --noise 0 --dropout 0 --seed 41",
                  tmp.path)
              .exit_code == 0);
  const fs::path run = tmp.path / "run";
  REQUIRE(run_cli("associate --input " + seq.string() + " --format synth --output " +
                      run.string(),
                  tmp.path)
              .exit_code == 0);
  const CliResult r = run_cli("evaluate --gt " + (seq / "gt").string() + " --pred " +
                                  (run / "labels").string() + " --output " +
                                  (tmp.path / "eval").string(),
                              tmp.path);
  REQUIRE(r.exit_code == 0);
  CHECK(stdout_value(r.out, "lstq") == 1.0);
  CHECK(stdout_value(r.out, "motsa") == 1.0);
}

TEST_CASE("cli evaluate reports a split track at half association quality") {
  TempDir tmp;
  const fs::path gt = tmp.path / "gt", pred = tmp.path / "pred";
  fs::create_directories(gt);
  fs::create_directories(pred);
  const std::vector<uint32_t> semantic(10, 1);
  const std::vector<uint32_t> gt_ids(10, 7);
  for (int f = 0; f < 10; ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06d.label", f);
    write_label_frame(gt / name, semantic, gt_ids);
    write_label_frame(pred / name, semantic,
                      std::vector<uint32_t>(10, f < 5 ? 1u : 2u));
  }
  const fs::path out = tmp.path / "eval";
  const CliResult r = run_cli("evaluate --gt " + gt.string() + " --pred " + pred.string() +
                                  " --output " + out.string() + " --report structured",
                              tmp.path);
  REQUIRE(r.exit_code == 0);
  const json report = json::parse(slurp(out / "report.json"));
  CHECK(report.at("s_assoc") == 0.5);
  CHECK(report.at("id_switches") == 1);
  // structured mode prints the same document to stdout
  CHECK(json::parse(r.out) == report);
}

TEST_CASE("cli rejects broken inputs with exit code 2") {
  TempDir tmp;

  SUBCASE("kitti directory without poses names the missing file") {
    const fs::path in = tmp.path / "kitti";
    fs::create_directories(in / "velodyne");
    fs::create_directories(in / "labels");
    std::ofstream(in / "calib.txt") << "Tr: 1 0 0 0 0 1 0 0 0 0 1 0\n";
    const CliResult r = run_cli("associate --input " + in.string() +
                                    " --format kitti --output " + (tmp.path / "out").string(),
                                tmp.path);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("poses.txt") != std::string::npos);
  }

  SUBCASE("kitti scan with a truncated point record") {
    const fs::path in = tmp.path / "kitti";
    fs::create_directories(in / "velodyne");
    fs::create_directories(in / "labels");
    std::ofstream(in / "calib.txt") << "Tr: 1 0 0 0 0 1 0 0 0 0 1 0\n";
    std::ofstream(in / "poses.txt") << "1 0 0 0 0 1 0 0 0 0 1 0\n";
    std::ofstream(in / "velodyne" / "000000.bin", std::ios::binary)
        << std::string(20, '\0');  // not a multiple of 16
    std::ofstream(in / "labels" / "000000.label", std::ios::binary) << std::string(4, '\0');
    const CliResult r = run_cli("associate --input " + in.string() +
                                    " --format kitti --output " + (tmp.path / "out").string(),
                                tmp.path);
    CHECK(r.exit_code == 2);
    CHECK(!r.err.empty());
  }

  SUBCASE("evaluate with mismatched frame counts") {
    const fs::path gt = tmp.path / "gt", pred = tmp.path / "pred";
    fs::create_directories(gt);
    fs::create_directories(pred);
    const std::vector<uint32_t> sem(3, 1), ids(3, 1);
    write_label_frame(gt / "000000.label", sem, ids);
    write_label_frame(gt / "000001.label", sem, ids);
    write_label_frame(pred / "000000.label", sem, ids);
    const CliResult r = run_cli("evaluate --gt " + gt.string() + " --pred " + pred.string() +
                                    " --output " + (tmp.path / "out").string(),
                                tmp.path);
    CHECK(r.exit_code == 2);
  }

  SUBCASE("unknown flag value") {
    const CliResult r = run_cli("associate --input x --output y --matching fastest", tmp.path);
    CHECK(r.exit_code == 2);
  }

  SUBCASE("unknown configuration key") {
    std::ofstream(tmp.path / "bad.config") << "tau_centre = 0.1\n";
    const fs::path seq = tmp.path / "seq";
    REQUIRE(run_cli("synth --output " + seq.string() + " --frames 2 --bodies 1", tmp.path)
                .exit_code == 0);
    const CliResult r = run_cli("associate --input " + seq.string() +
                                    " --format synth --output " + (tmp.path / "out").string() +
                                    " --config " + (tmp.path / "bad.config").string(),
                                tmp.path);
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("tau_centre") != std::string::npos);
  }
}

TEST_CASE("cli help exits zero") {
  TempDir tmp;
  CHECK(run_cli("--help", tmp.path).exit_code == 0);
  CHECK(run_cli("associate --help", tmp.path).exit_code == 0);
}

TEST_CASE("cli bench prints one row per mode and size") {
  TempDir tmp;
  const CliResult r = run_cli("bench --sizes 64,128 --modes nn --repeats 1", tmp.path);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("mode=nn n=64 ") != std::string::npos);
  CHECK(r.out.find("mode=nn n=128 ") != std::string::npos);
  CHECK(r.out.find("sinkhorn_scaling_exponent") == std::string::npos);

  SUBCASE("sinkhorn rows come with a scaling exponent") {
    const CliResult s = run_cli("bench --sizes 64,128 --modes sinkhorn --repeats 1", tmp.path);
    REQUIRE(s.exit_code == 0);
    CHECK(s.out.find("mode=sinkhorn n=64 ") != std::string::npos);
    CHECK(s.out.find("sinkhorn_scaling_exponent=") != std::string::npos);
  }
}

TEST_CASE("cli config file echoes back through --config unchanged") {
  TempDir tmp;
  const fs::path seq = tmp.path / "seq";
  REQUIRE(run_cli("synth --output " + seq.string() + " --frames 4 --bodies 2 --seed 5",
                  tmp.path)
              .exit_code == 0);

  const fs::path first = tmp.path / "first";
  REQUIRE(run_cli("associate --input " + seq.string() + " --format synth --output " +
                      first.string() + " --matching hungarian --seed 5 --dbscan 0.4,2",
                  tmp.path)
              .exit_code == 0);

  const fs::path second = tmp.path / "second";
  REQUIRE(run_cli("associate --input " + seq.string() + " --format synth --output " +
                      second.string() + " --config " + (first / "effective.config").string(),
                  tmp.path)
              .exit_code == 0);

  const json c1 = manifest_of(first).at("config");
  const json c2 = manifest_of(second).at("config");
  CHECK(c1 == c2);
  CHECK(c1.at("matching") == "hungarian");
  CHECK(c1.at("dbscan") == "0.40000000000000002,2");

  SUBCASE("flags override the config file") {
    const fs::path third = tmp.path / "third";
    REQUIRE(run_cli("associate --input " + seq.string() + " --format synth --output " +
                        third.string() + " --config " + (first / "effective.config").string() +
                        " --matching greedy",
                    tmp.path)
                .exit_code == 0);
    CHECK(manifest_of(third).at("config").at("matching") == "greedy");
  }
}

TEST_SUITE_END();
