#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace sitewatch::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // usage / configuration errors
inline constexpr int kExitData = 2;   // unreadable or malformed data

struct EvaluateOptions {
  std::string gt_dir;
  std::string pred_dir;
  std::string out_dir;
  double iou = 0.5;
};

/// Pairs label files by stem, pools matches, writes eval_report.json and the
/// four curve CSVs. A missing prediction file counts as zero detections; a
/// corrupt file skips that image (metrics from the rest stay intact) and the
/// exit code becomes kExitData.
int run_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err);

struct SimulateOptions {
  std::string experiment = "all";  // "all" or "1".."5"
  int trials = 6;
  std::optional<std::uint64_t> seed;  // overrides the config seed when given
  std::string config_path;            // optional; defaults apply when empty
  std::string out_dir;
};

/// Runs the five-experiment protocol and writes the success table (CSV and
/// rendered text) plus one JSON-lines transcript per trial. Failed trials are
/// data, not errors: the exit code stays kExitOk.
int run_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);

struct MonitorOptions {
  std::string replay_path;
  std::string config_path;  // optional
  std::string out_dir;
  std::optional<std::string> alert_command;  // overrides config + environment
};

/// Feeds a detection replay through the bus -> risk engine -> FSM pipeline,
/// printing every alert line and writing alert/command logs and bus stats.
int run_monitor(const MonitorOptions& opts, std::ostream& out, std::ostream& err);

struct ReportOptions {
  std::string in_dir;
  std::string out_path;  // optional; stdout always gets the document
};

/// Renders the recognized inputs of a directory (map50_models.json,
/// eval_report.json, success_table.csv) into one markdown document.
int run_report(const ReportOptions& opts, std::ostream& out, std::ostream& err);

/// Name of the environment variable overriding the external alert command.
inline constexpr const char* kAlertCommandEnv = "SITEWATCH_ALERT_CMD";

}  // namespace sitewatch::cli
