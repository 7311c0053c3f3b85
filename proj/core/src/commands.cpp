#include "sitewatch/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <vector>

#include "sitewatch/config.hpp"
#include "sitewatch/errors.hpp"
#include "sitewatch/eval.hpp"
#include "sitewatch/labels.hpp"
#include "sitewatch/replay.hpp"
#include "sitewatch/report.hpp"
#include "sitewatch/sim.hpp"

namespace sitewatch::cli {

namespace fs = std::filesystem;

namespace {

io::RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return io::RunConfig{};
  return io::load_config(path);
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

}  // namespace

int run_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
  if (!(opts.iou > 0.0 && opts.iou < 1.0)) {
    err << "evaluate: --iou must lie in (0,1)\n";
    return kExitUsage;
  }
  if (!fs::is_directory(opts.gt_dir)) {
    err << "evaluate: ground-truth directory not found: " << opts.gt_dir << "\n";
    return kExitUsage;
  }
  if (!fs::is_directory(opts.pred_dir)) {
    err << "evaluate: prediction directory not found: " << opts.pred_dir << "\n";
    return kExitUsage;
  }

  std::vector<fs::path> gt_files;
  for (const auto& entry : fs::directory_iterator(opts.gt_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      gt_files.push_back(entry.path());
    }
  }
  std::sort(gt_files.begin(), gt_files.end());
  if (gt_files.empty()) {
    err << "evaluate: no .txt label files in " << opts.gt_dir << "\n";
    return kExitData;
  }

  eval::Pooled pooled;
  bool file_errors = false;
  for (const fs::path& gt_path : gt_files) {
    const fs::path pred_path = fs::path(opts.pred_dir) / gt_path.filename();
    try {
      const auto gts = io::parse_ground_truth(gt_path);
      std::vector<Detection> preds;
      if (fs::exists(pred_path)) preds = io::parse_predictions(pred_path);
      pooled.add_image(preds, gts, opts.iou);
    } catch (const ParseError& e) {
      // A corrupt pair is excluded entirely; the rest of the run continues.
      err << "evaluate: " << e.what() << " (image skipped)\n";
      file_errors = true;
    }
  }

  if (pooled.total_gt() == 0 && pooled.images == 0) {
    err << "evaluate: every image failed to parse\n";
    return kExitData;
  }

  eval::EvalReport report;
  try {
    report = eval::make_report(pooled, opts.iou);
  } catch (const std::invalid_argument& e) {
    err << "evaluate: " << e.what() << "\n";
    return kExitData;
  }

  fs::create_directories(opts.out_dir);
  const fs::path out_dir(opts.out_dir);
  io::write_eval_report_json(out_dir / "eval_report.json", report);
  eval::SweepResult sweep = eval::confidence_sweep(pooled);
  if (pooled.entries.empty()) {
    // No predictions anywhere: emit the step conventions explicitly
    // (precision 1, recall 0, f1 0 across the whole axis).
    auto flat = [&](double y) {
      std::vector<eval::CurveSeries> series;
      for (Category c : all_categories()) {
        if (pooled.gt_count[static_cast<std::size_t>(index_of(c))] > 0) {
          series.push_back({std::string(to_string(c)), {{0.0, y}, {1.0, y}}});
        }
      }
      series.push_back({"all", {{0.0, y}, {1.0, y}}});
      return series;
    };
    sweep.precision_conf = flat(1.0);
    sweep.recall_conf = flat(0.0);
    sweep.f1_conf = flat(0.0);
  }
  io::write_curves_csv(out_dir / "f1_conf.csv", sweep.f1_conf);
  io::write_curves_csv(out_dir / "precision_conf.csv", sweep.precision_conf);
  io::write_curves_csv(out_dir / "recall_conf.csv", sweep.recall_conf);
  io::write_curves_csv(out_dir / "precision_recall.csv", eval::precision_recall_curves(pooled));

  out << "evaluate: " << pooled.images << " images, mAP50 ";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", report.map50);
  out << buf << ", report written to " << out_dir.string() << "\n";
  return file_errors ? kExitData : kExitOk;
}

int run_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  io::RunConfig config;
  try {
    config = load_config_or_default(opts.config_path);
  } catch (const ConfigError& e) {
    err << "simulate: " << e.what() << "\n";
    return kExitUsage;
  }

  sim::TableRequest request;
  if (opts.experiment == "all") {
    request.experiments = {1, 2, 3, 4, 5};
  } else if (opts.experiment.size() == 1 && opts.experiment[0] >= '1' &&
             opts.experiment[0] <= '5') {
    request.experiments = {opts.experiment[0] - '0'};
  } else {
    err << "simulate: --experiment must be 'all' or 1..5\n";
    return kExitUsage;
  }
  if (opts.trials < 1) {
    err << "simulate: --trials must be >= 1\n";
    return kExitUsage;
  }
  request.trials = opts.trials;
  request.seed = opts.seed.value_or(config.seed);
  request.subject_profile = config.subject_profile;
  request.duration_s = config.sim_duration_s;
  request.frame_rate = config.sim_frame_rate;

  const sim::TableResult result = sim::success_table(request, config.noise, config.trial_params());

  fs::create_directories(opts.out_dir);
  const fs::path out_dir(opts.out_dir);
  io::write_success_csv(out_dir / "success_table.csv", result.table);
  char protocol_line[192];
  std::snprintf(protocol_line, sizeof protocol_line,
                "protocol: %g s trials at %g fps, stop window %g s, confirm %d / clear %d "
                "frames, profile %s, seed %llu\n",
                config.sim_duration_s, config.sim_frame_rate, config.stop_window_s,
                config.risk.confirm_frames, config.risk.clear_frames,
                config.subject_profile.c_str(),
                static_cast<unsigned long long>(request.seed));
  const std::string rendered =
      io::render_success_table(io::success_rows(result.table)) + "\n" + protocol_line;
  {
    std::ofstream txt(out_dir / "success_table.txt");
    txt << rendered;
  }
  std::map<int, int> trial_index;
  for (const sim::TrialOutcome& outcome : result.outcomes) {
    const int k = trial_index[outcome.experiment]++;
    io::write_trial_jsonl(out_dir / ("trial_" + std::to_string(outcome.experiment) + "_" +
                                     std::to_string(k) + ".jsonl"),
                          outcome);
  }

  out << rendered;
  return kExitOk;
}

int run_monitor(const MonitorOptions& opts, std::ostream& out, std::ostream& err) {
  io::RunConfig config;
  try {
    config = load_config_or_default(opts.config_path);
  } catch (const ConfigError& e) {
    err << "monitor: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<FramePacket> frames;
  try {
    frames = io::read_replay(opts.replay_path);
  } catch (const ParseError& e) {
    err << "monitor: " << e.what() << "\n";
    return kExitData;
  }

  std::string alert_command = config.alert_command;
  if (const char* env = std::getenv(kAlertCommandEnv)) alert_command = env;
  if (opts.alert_command) alert_command = *opts.alert_command;

  pipeline::Pipeline pipe(config.pipeline_config());
  pipe.set_alert_hook([&](const pipeline::AlertRecord& alert) {
    out << alert.text << "\n";
    if (!alert_command.empty()) {
      const std::string cmd = alert_command + " " + shell_quote(alert.text);
      if (std::system(cmd.c_str()) != 0) {
        err << "monitor: alert command failed: " << cmd << "\n";
      }
    }
  });

  try {
    for (const FramePacket& frame : frames) pipe.feed(frame);
  } catch (const StreamError& e) {
    err << "monitor: " << e.what() << "\n";
    return kExitData;
  }

  const pipeline::Transcript transcript = pipe.take_transcript();
  fs::create_directories(opts.out_dir);
  const fs::path out_dir(opts.out_dir);
  io::write_alert_log_jsonl(out_dir / "alerts.jsonl", transcript.alerts);
  io::write_command_log_jsonl(out_dir / "commands.jsonl", transcript.commands);
  io::write_bus_stats_json(out_dir / "bus_stats.json", transcript.stats);

  out << "monitor: " << transcript.frames << " frames, " << transcript.alerts.size()
      << " alerts, logs written to " << out_dir.string() << "\n";
  return kExitOk;
}

int run_report(const ReportOptions& opts, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(opts.in_dir)) {
    err << "report: input directory not found: " << opts.in_dir << "\n";
    return kExitUsage;
  }
  const fs::path in_dir(opts.in_dir);
  std::string document;

  try {
    if (fs::exists(in_dir / "map50_models.json")) {
      document += io::render_map50_table(io::read_model_ap_json(in_dir / "map50_models.json"));
      document += "\n";
    }
    if (fs::exists(in_dir / "eval_report.json")) {
      const eval::EvalReport report = io::read_eval_report_json(in_dir / "eval_report.json");
      io::ModelApRow row;
      row.name = "evaluated model";
      row.ap50 = report.ap50;
      document += io::render_map50_table({row});
      if (report.best_f1) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "Best F1 %.3f at confidence %.3f (%s average)\n",
                      report.best_f1->f1, report.best_f1->confidence, report.averaging.c_str());
        document += buf;
      }
      document += "\n";
    }
    if (fs::exists(in_dir / "success_table.csv")) {
      document += io::render_success_table(io::read_success_csv(in_dir / "success_table.csv"));
      document += "\n";
    }
  } catch (const ParseError& e) {
    err << "report: " << e.what() << "\n";
    return kExitData;
  }

  if (document.empty()) {
    err << "report: nothing to render in " << opts.in_dir
        << " (expected map50_models.json, eval_report.json or success_table.csv)\n";
    return kExitData;
  }

  out << document;
  if (!opts.out_path.empty()) {
    std::ofstream file(opts.out_path);
    if (!file) {
      err << "report: cannot write " << opts.out_path << "\n";
      return kExitData;
    }
    file << document;
  }
  return kExitOk;
}

}  // namespace sitewatch::cli
