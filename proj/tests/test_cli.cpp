#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "forgescope/image_io/image_io.hpp"
#include "support/fixtures.hpp"
#include "support/jpeg_ref.hpp"
#include "support/synthetic.hpp"

#include <json.hpp>

using namespace forgescope;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out_file = scratch / "cli_stdout.txt";
  const fs::path err_file = scratch / "cli_stderr.txt";
  const std::string cmd = std::string("\"") + FORGESCOPE_CLI_PATH + "\" " + args + " > \"" +
                          out_file.string() + "\" 2> \"" + err_file.string() + "\"";
  const int status = std::system(cmd.c_str());
  CliResult r;
  if (status >= 0 && WIFEXITED(status)) r.exit = WEXITSTATUS(status);
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

fs::path write_test_jpeg(const fs::path& dir, const std::string& name, int height = 48,
                         int width = 48, unsigned seed = 11) {
  const fs::path path = dir / name;
  fs::create_directories(path.parent_path());
  write_bytes(path, ref_encode_jpeg(blob_image(height, width, seed, 3.0), 90));
  return path;
}

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run writes a heatmap next to the requested folder") {
  TempDir tmp;
  const fs::path img = write_test_jpeg(tmp.path(), "photo.jpg");
  const auto r = run_cli("run dq \"" + img.string() + "\" --output-folder \"" +
                             (tmp.path() / "out").string() + "\"",
                         tmp.path());
  CHECK(r.exit == 0);
  CHECK(contains(r.out, "heatmap: "));

  const fs::path heat = tmp.path() / "out" / "photo" / "heatmap.png";
  REQUIRE(fs::exists(heat));
  const Image decoded = image_io::read_image(heat);
  CHECK(decoded.channels() == 1);
  CHECK(decoded.height() == 48);
  CHECK(decoded.width() == 48);
}

TEST_CASE("run renders overlay and panel on request") {
  TempDir tmp;
  const fs::path img = write_test_jpeg(tmp.path(), "photo.jpg");
  const auto r = run_cli("run dq \"" + img.string() + "\" --output-folder \"" +
                             (tmp.path() / "out").string() + "\" --overlay --show-plot",
                         tmp.path());
  CHECK(r.exit == 0);

  const Image overlay = image_io::read_image(tmp.path() / "out" / "photo" / "overlay.png");
  CHECK(overlay.channels() == 3);
  CHECK(overlay.height() == 48);
  CHECK(overlay.width() == 48);

  // dq produces only a heatmap, so the panel is image + heatmap side by side.
  const Image panel = image_io::read_image(tmp.path() / "out" / "photo" / "panel.png");
  CHECK(panel.width() == 96);
  CHECK(panel.height() == 48);
}

TEST_CASE("run reports a detection score for detectors that emit one") {
  TempDir tmp;
  const fs::path img = write_test_jpeg(tmp.path(), "photo.jpg");
  const auto r = run_cli("run grid_align \"" + img.string() + "\" --output-folder \"" +
                             (tmp.path() / "out").string() + "\"",
                         tmp.path());
  CHECK(r.exit == 0);
  CHECK(contains(r.out, "detection: "));
  CHECK(contains(r.out, "mask: "));
  CHECK(fs::exists(tmp.path() / "out" / "photo" / "mask.png"));
}

TEST_CASE("run without an output folder only prints") {
  TempDir tmp;
  const fs::path img = write_test_jpeg(tmp.path(), "photo.jpg");
  const auto r = run_cli("run noise_blocks \"" + img.string() + "\"", tmp.path());
  CHECK(r.exit == 0);
  CHECK(!fs::exists(tmp.path() / "out"));
}

TEST_CASE("usage errors exit with 2") {
  TempDir tmp;
  const fs::path img = write_test_jpeg(tmp.path(), "photo.jpg");

  const auto unknown = run_cli("run frobnicate \"" + img.string() + "\"", tmp.path());
  CHECK(unknown.exit == 2);
  CHECK(!unknown.err.empty());

  const auto no_sub = run_cli("", tmp.path());
  CHECK(no_sub.exit == 2);

  const auto bad_sub = run_cli("summon", tmp.path());
  CHECK(bad_sub.exit == 2);
}

TEST_CASE("processing failures exit with 1") {
  TempDir tmp;
  const auto missing = run_cli("run dq \"" + (tmp.path() / "nope.jpg").string() + "\"",
                               tmp.path());
  CHECK(missing.exit == 1);
  CHECK(!missing.err.empty());
}

TEST_CASE("help exits cleanly") {
  TempDir tmp;
  const auto r = run_cli("--help", tmp.path());
  CHECK(r.exit == 0);
  CHECK(contains(r.out, "run"));
  CHECK(contains(r.out, "benchmark"));
}

TEST_CASE("benchmark runs a registered dataset end to end") {
  TempDir tmp;
  // Minimal casia1_sp-shaped tree: two forged with masks, one authentic.
  const fs::path root = tmp.path() / "casia";
  for (int i = 0; i < 2; ++i) {
    const std::string stem = "Sp_D_0" + std::to_string(i);
    write_test_jpeg(root, "Sp/" + stem + ".jpg", 48, 48, 20 + unsigned(i));
    Image mask(1, 48, 48, 0);
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 48; ++x) mask.at(0, y, x) = 255;
    fs::create_directories(root / "gt/Sp");
    image_io::write_png(root / "gt/Sp" / (stem + "_gt.png"), mask);
  }
  write_test_jpeg(root, "Au/Au_D_00.jpg", 48, 48, 30);

  const fs::path out = tmp.path() / "bench_out";
  const auto r = run_cli("benchmark dq casia1_sp \"" + root.string() +
                             "\" --metrics f1,auroc,f1_weighted_v2 --output-folder \"" +
                             out.string() + "\"",
                         tmp.path());
  CHECK(r.exit == 0);
  REQUIRE(contains(r.out, "report: "));

  std::istringstream lines(r.out);
  std::string line;
  fs::path report;
  while (std::getline(lines, line))
    if (line.starts_with("report: ")) report = line.substr(8);
  REQUIRE(fs::exists(report));
  const nlohmann::json j = nlohmann::json::parse(slurp(report));
  CHECK(j["method"] == "dq");
  CHECK(j["dataset"] == "casia1_sp");
  CHECK(j["images_evaluated"] == 3);
  CHECK(j["metrics"].size() == 3);
}

TEST_CASE("benchmark rejects bad metric and dataset names") {
  TempDir tmp;
  const fs::path root = tmp.path() / "casia";
  write_test_jpeg(root, "Sp/Sp_D_00.jpg");

  const auto bad_metric = run_cli(
      "benchmark dq casia1_sp \"" + root.string() + "\" --metrics f1,bogus", tmp.path());
  CHECK(bad_metric.exit == 2);

  const auto bad_dataset =
      run_cli("benchmark dq imagenet \"" + root.string() + "\"", tmp.path());
  CHECK(bad_dataset.exit == 2);
}

}  // TEST_SUITE
