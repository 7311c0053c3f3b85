#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "sitewatch/commands.hpp"
#include "sitewatch/labels.hpp"
#include "sitewatch/report.hpp"
#include "sitewatch/replay.hpp"
#include "sitewatch/sim.hpp"

// End-to-end checks against the installed binary; SITEWATCH_CLI_PATH points
// at the build-tree executable.

namespace fs = std::filesystem;
using namespace sitewatch;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const fs::path out_file =
      fs::temp_directory_path() / ("sitewatch_cli_out_" + std::to_string(counter++) + ".txt");
  const std::string cmd = env_prefix + std::string(SITEWATCH_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.output = slurp(out_file);
  fs::remove(out_file);
  return result;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sitewatch_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Three-image dataset. Predictions mirror the ground truth exactly.
void write_dataset(const fs::path& gt_dir, const fs::path& pred_dir) {
  fs::create_directories(gt_dir);
  fs::create_directories(pred_dir);
  int n = 0;
  for (const char* stem : {"img_a", "img_b", "img_c"}) {
    std::vector<GroundTruthBox> gts;
    gts.emplace_back(Category::Person, BBox(0.4 + 0.05 * n, 0.5, 0.2, 0.4));
    gts.emplace_back(Category::Hardhat, BBox(0.4 + 0.05 * n, 0.32, 0.08, 0.06));
    if (n == 1) gts.emplace_back(Category::Vehicle, BBox(0.8, 0.8, 0.2, 0.15));
    io::write_ground_truth(gt_dir / (std::string(stem) + ".txt"), gts);

    std::vector<Detection> preds;
    for (const auto& g : gts) preds.emplace_back(g.category, g.box, 1.0);
    io::write_predictions(pred_dir / (std::string(stem) + ".txt"), preds);
    ++n;
  }
}

}  // namespace

TEST_CASE("evaluate: perfect and empty prediction sets") {
  const fs::path root = fresh_dir("evaluate");
  write_dataset(root / "gt", root / "pred");

  SUBCASE("perfect predictions give mAP50 = 1") {
    const auto r = run_cli("evaluate --gt " + (root / "gt").string() + " --pred " +
                           (root / "pred").string() + " --iou 0.5 --out " +
                           (root / "out").string());
    CHECK(r.exit_code == 0);
    const std::string report = slurp(root / "out" / "eval_report.json");
    CHECK(report.find("\"map50\": 1.0") != std::string::npos);
    for (const char* curve :
         {"f1_conf.csv", "precision_conf.csv", "recall_conf.csv", "precision_recall.csv"}) {
      CHECK(fs::exists(root / "out" / curve));
    }
  }

  SUBCASE("empty prediction dir gives mAP50 = 0 and a flat-zero recall curve") {
    fs::create_directories(root / "none");
    const auto r = run_cli("evaluate --gt " + (root / "gt").string() + " --pred " +
                           (root / "none").string() + " --out " + (root / "out0").string());
    CHECK(r.exit_code == 0);
    const std::string report = slurp(root / "out0" / "eval_report.json");
    CHECK(report.find("\"map50\": 0.0") != std::string::npos);
    std::istringstream recall(slurp(root / "out0" / "recall_conf.csv"));
    std::string line;
    std::getline(recall, line);  // header
    int rows = 0;
    while (std::getline(recall, line)) {
      CHECK(line.substr(line.rfind(',') + 1) == "0.000000");
      ++rows;
    }
    CHECK(rows > 0);
  }

  SUBCASE("a corrupt file is isolated and flips the exit code") {
    std::ofstream(root / "pred" / "img_b.txt") << "0 not a label\n";
    const auto r = run_cli("evaluate --gt " + (root / "gt").string() + " --pred " +
                           (root / "pred").string() + " --out " + (root / "out2").string());
    CHECK(r.exit_code == 2);
    // Remaining images are perfect, so the metrics stay exact.
    const std::string report = slurp(root / "out2" / "eval_report.json");
    CHECK(report.find("\"map50\": 1.0") != std::string::npos);
    CHECK(report.find("\"images\": 2") != std::string::npos);
  }

  SUBCASE("a missing prediction file counts as zero detections for that image") {
    fs::remove(root / "pred" / "img_c.txt");
    const auto r = run_cli("evaluate --gt " + (root / "gt").string() + " --pred " +
                           (root / "pred").string() + " --out " + (root / "out3").string());
    CHECK(r.exit_code == 0);  // not an error, just missed recall
    const std::string report = slurp(root / "out3" / "eval_report.json");
    CHECK(report.find("\"images\": 3") != std::string::npos);
    CHECK(report.find("\"map50\": 1.0") == std::string::npos);
  }

  SUBCASE("a ground-truth directory without label files is a data error") {
    fs::create_directories(root / "empty_gt");
    CHECK(run_cli("evaluate --gt " + (root / "empty_gt").string() + " --pred " +
                  (root / "pred").string() + " --out " + (root / "out4").string())
              .exit_code == 2);
  }

  SUBCASE("usage errors") {
    CHECK(run_cli("evaluate --gt missing_dir --pred also_missing --out x").exit_code == 1);
    CHECK(run_cli("evaluate").exit_code == 1);
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("evaluate --gt . --pred . --iou 1.5 --out x").exit_code == 1);
  }
}

TEST_CASE("simulate: deterministic outputs and table shape") {
  const fs::path root = fresh_dir("simulate");

  const std::string base = "simulate --experiment all --trials 2 --seed 7 --out ";
  const auto first = run_cli(base + (root / "a").string());
  CHECK(first.exit_code == 0);
  const auto second = run_cli(base + (root / "b").string());
  CHECK(second.exit_code == 0);

  const std::string csv = slurp(root / "a" / "success_table.csv");
  CHECK(csv == slurp(root / "b" / "success_table.csv"));
  CHECK(csv.find("experiment,number_tests,tests_subject,success_rate") == 0);
  for (int e = 1; e <= 5; ++e) {
    CHECK(csv.find(std::to_string(e) + ",2,") != std::string::npos);
  }

  // Trial transcripts reproduce byte for byte.
  CHECK(slurp(root / "a" / "trial_3_1.jsonl") == slurp(root / "b" / "trial_3_1.jsonl"));
  CHECK(!slurp(root / "a" / "trial_5_0.jsonl").empty());

  SUBCASE("config errors name the key and exit 1") {
    std::ofstream(root / "bad.cfg") << "risk.confirm_frames = soon\n";
    const auto r = run_cli("simulate --config " + (root / "bad.cfg").string() + " --out " +
                           (root / "c").string());
    CHECK(r.exit_code == 1);
    std::ofstream(root / "unknown.cfg") << "robot.speed = 1\n";
    CHECK(run_cli("simulate --config " + (root / "unknown.cfg").string() + " --out " +
                  (root / "c").string())
              .exit_code == 1);
  }

  SUBCASE("bad experiment id exits 1") {
    CHECK(run_cli("simulate --experiment 9 --out " + (root / "d").string()).exit_code == 1);
  }

  SUBCASE("a config file reshapes the protocol") {
    std::ofstream(root / "short.cfg") << "sim.duration_s = 2\nsim.frame_rate = 5\n";
    const auto r = run_cli("simulate --experiment 1 --trials 1 --config " +
                           (root / "short.cfg").string() + " --out " + (root / "e").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("protocol: 2 s trials at 5 fps") != std::string::npos);
    const std::string trial = slurp(root / "e" / "trial_1_0.jsonl");
    CHECK(trial.find("\"frames\":10") != std::string::npos);
  }
}

TEST_CASE("monitor: replay drives the pipeline") {
  const fs::path root = fresh_dir("monitor");
  const auto scenario = sim::scenario_for(2, /*duration_s=*/4.0, /*frame_rate=*/5.0);
  io::write_replay(root / "replay.jsonl", sim::render_gt_frames(scenario));

  const std::string base = "monitor --replay " + (root / "replay.jsonl").string() + " --out ";
  const auto r = run_cli(base + (root / "a").string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("Warning: worker without hardhat detected") != std::string::npos);

  const std::string alerts = slurp(root / "a" / "alerts.jsonl");
  CHECK(alerts.find("NO-Hardhat") != std::string::npos);
  CHECK(fs::exists(root / "a" / "commands.jsonl"));
  CHECK(fs::exists(root / "a" / "bus_stats.json"));

  // From the confirmation frame on, every command is a stop.
  std::istringstream commands(slurp(root / "a" / "commands.jsonl"));
  std::string line;
  int stopped = 0;
  int total = 0;
  while (std::getline(commands, line)) {
    ++total;
    if (line.find("\"linear\":0.0") != std::string::npos &&
        line.find("\"angular\":0.0") != std::string::npos) {
      ++stopped;
    }
  }
  CHECK(total == 20);
  CHECK(stopped == 18);  // frames 2..19

  SUBCASE("identical runs are byte-identical") {
    const auto again = run_cli(base + (root / "b").string());
    CHECK(again.exit_code == 0);
    CHECK(slurp(root / "a" / "alerts.jsonl") == slurp(root / "b" / "alerts.jsonl"));
    CHECK(slurp(root / "a" / "commands.jsonl") == slurp(root / "b" / "commands.jsonl"));
    CHECK(slurp(root / "a" / "bus_stats.json") == slurp(root / "b" / "bus_stats.json"));
  }

  SUBCASE("the external alert command receives each alert") {
    const fs::path script = root / "hook.sh";
    const fs::path log = root / "hook.log";
    std::ofstream(script) << "#!/bin/sh\necho \"$1\" >> " << log.string() << "\n";
    fs::permissions(script, fs::perms::owner_all);
    const auto hooked =
        run_cli(base + (root / "c").string(),
                "SITEWATCH_ALERT_CMD=" + script.string() + " ");
    CHECK(hooked.exit_code == 0);
    const std::string lines = slurp(log);
    CHECK(lines.find("hardhat") != std::string::npos);
    CHECK(lines.find("safety vest") != std::string::npos);
  }

  SUBCASE("schema mismatch exits 2 before processing") {
    std::ofstream(root / "bad.jsonl")
        << R"({"schema_version":99,"frame_id":0,"timestamp":0,"detections":[]})" << "\n";
    CHECK(run_cli("monitor --replay " + (root / "bad.jsonl").string() + " --out " +
                  (root / "d").string())
              .exit_code == 2);
    CHECK(!fs::exists(root / "d" / "alerts.jsonl"));
  }
}

TEST_CASE("evaluate: randomized fixture matches the brute-force oracle") {
  const fs::path root = fresh_dir("evaluate_oracle");
  fs::create_directories(root / "gt");
  fs::create_directories(root / "pred");

  std::mt19937_64 rng(83);
  const oracle::Dataset raw = oracle::random_dataset(rng, 3, 10, 15);
  for (std::size_t i = 0; i < raw.gts.size(); ++i) {
    const std::string stem = "img_" + std::to_string(i) + ".txt";
    io::write_ground_truth(root / "gt" / stem, raw.gts[i]);
    io::write_predictions(root / "pred" / stem, raw.preds[i]);
  }

  // The oracle consumes exactly what the command will read back, so the
  // 6-decimal file quantization affects both routes identically.
  oracle::Dataset data;
  for (std::size_t i = 0; i < raw.gts.size(); ++i) {
    const std::string stem = "img_" + std::to_string(i) + ".txt";
    data.gts.push_back(io::parse_ground_truth(root / "gt" / stem));
    data.preds.push_back(io::parse_predictions(root / "pred" / stem));
  }

  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_evaluate(
      {(root / "gt").string(), (root / "pred").string(), (root / "out").string(), 0.5}, out, err);
  REQUIRE(code == 0);

  const auto report = io::read_eval_report_json(root / "out" / "eval_report.json");
  for (int c = 0; c < 3; ++c) {
    const auto category = static_cast<Category>(c);
    const auto expected = oracle::ap50_by_brute_force(data, category, 0.5);
    const auto& actual = report.ap50[static_cast<std::size_t>(c)];
    REQUIRE(expected.has_value() == actual.has_value());
    if (expected) CHECK(*actual == doctest::Approx(*expected).epsilon(1e-6));
  }
}

TEST_CASE("report: renders fixtures byte-stably") {
  const auto r = run_cli("report --in " + std::string(SITEWATCH_FIXTURES_DIR));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("| YOLOv8m | 0.865 | 0.640 | 0.630 | 0.735 |") != std::string::npos);
  CHECK(r.output.find("| YOLOv5s | 0.897 | 0.717 | 0.672 | 0.685 |") != std::string::npos);
  CHECK(r.output.find("| YOLOv5s | 0.953 | 0.627 |") != std::string::npos);
  CHECK(r.output.find("| 4 | 4 | 1 | 75% |") != std::string::npos);
  CHECK(r.output.find("| 5 | 5 | 1 and 2 | 80% |") != std::string::npos);
  CHECK(r.output.find("| 4 | 4 | 2 | 25% |") != std::string::npos);

  const auto again = run_cli("report --in " + std::string(SITEWATCH_FIXTURES_DIR));
  CHECK(r.output == again.output);

  SUBCASE("an empty directory exits 2") {
    const fs::path root = fresh_dir("report_empty");
    CHECK(run_cli("report --in " + root.string()).exit_code == 2);
  }
}
