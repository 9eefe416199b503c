#include "camfield/cli.hpp"
#include "camfield/image_io.hpp"
#include "camfield/pipeline.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace camfield;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string &name)
      : path(fs::temp_directory_path() / ("camfield_cli_" + name + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("terms") {
  const Run r = run({"terms", "--roll", "-30", "--pitch", "10", "--fov", "50"});
  CHECK(r.code == 0);
  CHECK(r.out == "roll: large counterclockwise Dutch angle\npitch: small tilt-up\nfov: medium shot\n");

  const Run c = run({"terms", "--roll=-30", "--pitch=10", "--fov=50", "--caption", "a street"});
  CHECK(c.code == 0);
  CHECK(c.out.find("<answer>-0.5236, 0.1745, 0.8727</answer>") != std::string::npos);

  const Run bad = run({"terms", "--roll", "80", "--pitch", "0", "--fov", "50"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("roll") != std::string::npos);
}

TEST_CASE("usage errors") {
  const Run r = run({"terms", "--roll", "1", "--pitch", "2", "--fov", "50", "--bogus"});
  CHECK(r.code != 0);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(r.err.find("--roll") != std::string::npos);

  CHECK(run({}).code != 0);
  CHECK(run({"terms", "--roll", "1"}).code != 0);
  CHECK(run({"pipeline", "--out", "/tmp/x", "--roll-range", "10"}).code != 0);
  const Run help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("pipeline") != std::string::npos);
}

TEST_CASE("horizon") {
  const Run level = run({"horizon", "--roll", "0", "--pitch", "0", "--fov", "60", "--size", "512"});
  CHECK(level.out == "visible start=-0.500,255.500 end=511.500,255.500\n");
  CHECK(run({"horizon", "--pitch", "80", "--fov", "40"}).out == "not-visible\n");
}

TEST_CASE("field and calibrate round trip") {
  TempDir dir("field");
  const std::string map = (dir.path / "m.pfld").string();
  CHECK(run({"field", "--roll", "-14", "--pitch", "22", "--fov", "57", "--size", "96", "--out", map}).code == 0);
  const Run cal = run({"calibrate", "--map", map});
  CHECK(cal.code == 0);
  CHECK(cal.out.rfind("roll=-14.0000 pitch=22.0000 yaw=0.0000 vfov=57.0000 ", 0) == 0);
  CHECK(cal.out.find("converged=true") != std::string::npos);

  CHECK(run({"calibrate", "--map", (dir.path / "missing.pfld").string()}).code == 1);
}

TEST_CASE("render") {
  TempDir dir("render");
  const std::string png = (dir.path / "v.png").string();
  CHECK(run({"render", "--roll", "3", "--fov", "70", "--size", "24", "--synthetic", "32", "--out", png}).code == 0);
  const RgbImage img = read_png(png);
  CHECK(img.width() == 24);
  CHECK(img.height() == 24);
}

TEST_CASE("pipeline runs are reproducible") {
  TempDir a("pa"), b("pb");
  const std::vector<std::string> common{"pipeline", "--seed", "7", "--count", "2", "--size", "24",
                                        "--synthetic", "64", "--cross-view", "--guidance", "--candidates", "2"};
  auto args_a = common;
  args_a.insert(args_a.end(), {"--out", a.path.string()});
  auto args_b = common;
  args_b.insert(args_b.end(), {"--out", b.path.string(), "--threads", "3"});
  REQUIRE(run(args_a).code == 0);
  REQUIRE(run(args_b).code == 0);
  CHECK(read_bytes(a.path / "manifest.txt") == read_bytes(b.path / "manifest.txt"));
  const auto records = read_manifest(a.path / "manifest.txt");
  CHECK(records.size() == 2 + 4 + 3);
  for (const auto &r : records) {
    CHECK(read_bytes(a.path / r.image) == read_bytes(b.path / r.image));
    CHECK(read_bytes(a.path / r.map) == read_bytes(b.path / r.map));
  }
}

TEST_CASE("pipeline config file and overrides") {
  TempDir dir("cfg");
  {
    std::ofstream cfg(dir.path / "run.cfg");
    cfg << "# sample config\nseed=11\ncount=3\nsize=16\nsynthetic=32\nroll-range=-10,10\ncross-view=false\n";
  }
  const fs::path out1 = dir.path / "o1", out2 = dir.path / "o2";
  REQUIRE(run({"pipeline", "--config", (dir.path / "run.cfg").string(), "--out", out1.string()}).code == 0);
  auto recs = read_manifest(out1 / "manifest.txt");
  CHECK(recs.size() == 3);
  for (const auto &r : recs) CHECK(std::abs(r.roll) <= 10.0);

  REQUIRE(run({"pipeline", "--config", (dir.path / "run.cfg").string(), "--out", out2.string(), "--count", "1",
               "--roll-range=-45,-30"})
              .code == 0);
  recs = read_manifest(out2 / "manifest.txt");
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].roll <= -30.0);

  CHECK(run({"pipeline", "--config", (dir.path / "none.cfg").string(), "--out", out2.string()}).code != 0);
}

TEST_CASE("eval") {
  TempDir dir("eval");
  REQUIRE(run({"pipeline", "--seed", "3", "--count", "4", "--size", "16", "--synthetic", "32", "--out",
               dir.path.string()})
              .code == 0);
  const std::string manifest = (dir.path / "manifest.txt").string();
  const Run r = run({"eval", "--pred", manifest, "--gt", manifest, "--field-size", "16"});
  CHECK(r.code == 0);
  CHECK(r.out.find("roll_median=0.00\n") != std::string::npos);
  CHECK(r.out.find("roll_auc1=100.00\n") != std::string::npos);
  CHECK(r.out.find("vfov_auc10=100.00\n") != std::string::npos);
  CHECK(r.out.find("count=4") != std::string::npos);

  {
    std::ofstream partial(dir.path / "partial.txt");
    partial << "id=nothing roll=0 pitch=0 vfov=50\n";
  }
  CHECK(run({"eval", "--pred", (dir.path / "partial.txt").string(), "--gt", manifest}).code == 1);
}
