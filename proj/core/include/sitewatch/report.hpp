#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sitewatch/bus.hpp"
#include "sitewatch/eval.hpp"
#include "sitewatch/pipeline.hpp"
#include "sitewatch/sim.hpp"

namespace sitewatch::io {

/// Per-architecture AP50 values, e.g. loaded from a model-comparison fixture.
struct ModelApRow {
  std::string name;
  std::array<std::optional<double>, kCategoryCount> ap50{};  // taxonomy order

  std::optional<double> map50() const;
};

/// Renders the architecture-by-category AP50 comparison in the reference
/// layout: three stacked blocks of 4, 4 and 2 category columns, one row per
/// architecture, missing values as an em dash. Deterministic output.
std::string render_map50_table(const std::vector<ModelApRow>& models);

struct SuccessTableRow {
  std::string experiment;
  std::string tests;
  std::string subject;
  std::string rate;  // percent, without the sign
};

std::string render_success_table(const std::vector<SuccessTableRow>& rows);

std::vector<SuccessTableRow> success_rows(const sim::SuccessTable& table);

/// Percent formatting used across tables: integers stay integers ("75"),
/// otherwise one decimal ("37.5").
std::string format_percent(double fraction);

// --- file formats -----------------------------------------------------------

void write_eval_report_json(const std::filesystem::path& path, const eval::EvalReport& report);
eval::EvalReport read_eval_report_json(const std::filesystem::path& path);

/// Long-format curve CSV: label,x,y per row, categories in taxonomy order
/// with the "all" aggregate last.
std::string format_curves_csv(const std::vector<eval::CurveSeries>& series);
void write_curves_csv(const std::filesystem::path& path,
                      const std::vector<eval::CurveSeries>& series);

std::string format_success_csv(const sim::SuccessTable& table);
void write_success_csv(const std::filesystem::path& path, const sim::SuccessTable& table);
std::vector<SuccessTableRow> read_success_csv(const std::filesystem::path& path);

void write_bus_stats_json(const std::filesystem::path& path, const bus::BusStats& stats);

/// One trial transcript as JSON lines (frames, events, alerts, commands,
/// final outcome), byte-stable for a fixed trial.
std::string format_trial_jsonl(const sim::TrialOutcome& outcome);
void write_trial_jsonl(const std::filesystem::path& path, const sim::TrialOutcome& outcome);

void write_alert_log_jsonl(const std::filesystem::path& path,
                           const std::vector<pipeline::AlertRecord>& alerts);
void write_command_log_jsonl(const std::filesystem::path& path,
                             const std::vector<pipeline::CommandRecord>& commands);

std::vector<ModelApRow> read_model_ap_json(const std::filesystem::path& path);
void write_model_ap_json(const std::filesystem::path& path,
                         const std::vector<ModelApRow>& models);

}  // namespace sitewatch::io
