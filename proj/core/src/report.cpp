#include "sitewatch/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sitewatch/errors.hpp"

namespace sitewatch::io {

namespace {

using nlohmann::json;

// Category column order of the AP50 comparison layout (three blocks).
constexpr std::array<Category, 4> kBlock1 = {Category::Hardhat, Category::NoHardhat,
                                             Category::NoMask, Category::NoSafetyVest};
constexpr std::array<Category, 4> kBlock2 = {Category::Person, Category::SafetyCone,
                                             Category::SafetyVest, Category::Mask};
constexpr std::array<Category, 2> kBlock3 = {Category::Machinery, Category::Vehicle};

std::string format_ap(const std::optional<double>& v) {
  if (!v) return "—";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

template <std::size_t N>
void render_block(std::string& out, const std::vector<ModelApRow>& models,
                  const std::array<Category, N>& columns) {
  out += "| Architecture |";
  for (Category c : columns) {
    out += ' ';
    out += to_string(c);
    out += " |";
  }
  out += "\n|---|";
  for (std::size_t i = 0; i < N; ++i) out += "---|";
  out += '\n';
  for (const ModelApRow& model : models) {
    out += "| ";
    out += model.name;
    out += " |";
    for (Category c : columns) {
      out += ' ';
      out += format_ap(model.ap50[static_cast<std::size_t>(index_of(c))]);
      out += " |";
    }
    out += '\n';
  }
  out += '\n';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << text;
}

json stats_to_json(const bus::BusStats& stats) {
  json topics = json::array();
  for (const auto& t : stats.topics) {
    json queues = json::array();
    for (const auto& q : t.queues) {
      queues.push_back({{"delivered", q.delivered}, {"dropped", q.dropped}});
    }
    topics.push_back({{"name", t.name},
                      {"published", t.published},
                      {"delivered", t.delivered()},
                      {"dropped", t.dropped()},
                      {"max_depth", t.max_depth},
                      {"queues", std::move(queues)}});
  }
  return {{"topics", std::move(topics)}};
}

json alert_to_json(const pipeline::AlertRecord& a) {
  return {{"type", "alert"},           {"frame_id", a.frame_id},
          {"timestamp", a.timestamp},  {"text", a.text},
          {"kind", index_of(a.kind)},  {"kind_name", std::string(to_string(a.kind))},
          {"subject", a.subject}};
}

json command_to_json(const pipeline::CommandRecord& c) {
  return {{"type", "command"},
          {"frame_id", c.frame_id},
          {"timestamp", c.timestamp},
          {"linear", c.linear},
          {"angular", c.angular},
          {"mode", std::string(fsm::to_string(c.mode))},
          {"alerts", c.alerts}};
}

json event_to_json(const pipeline::EventRecord& rec) {
  json out = {{"type", "event"},
              {"state", rec.event.state == risk::RiskEventState::Raised ? "Raised" : "Cleared"},
              {"kind", index_of(rec.event.kind)},
              {"kind_name", std::string(to_string(rec.event.kind))},
              {"frame_id", rec.event.frame_id},
              {"timestamp", rec.event.timestamp},
              {"subject", rec.event.subject}};
  if (rec.subject_box) {
    out["subject_box"] = {{"cx", rec.subject_box->cx},
                          {"cy", rec.subject_box->cy},
                          {"w", rec.subject_box->w},
                          {"h", rec.subject_box->h}};
  }
  return out;
}

}  // namespace

std::optional<double> ModelApRow::map50() const {
  double sum = 0.0;
  int defined = 0;
  for (const auto& v : ap50) {
    if (v) {
      sum += *v;
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return sum / defined;
}

std::string render_map50_table(const std::vector<ModelApRow>& models) {
  std::string out = "Box AP50 per architecture and class\n\n";
  render_block(out, models, kBlock1);
  render_block(out, models, kBlock2);
  render_block(out, models, kBlock3);
  out += "mAP50 over defined classes:";
  for (const ModelApRow& model : models) {
    out += ' ';
    out += model.name;
    out += ' ';
    out += format_ap(model.map50());
  }
  out += '\n';
  return out;
}

std::string format_percent(double fraction) {
  const double percent = fraction * 100.0;
  const double rounded = std::round(percent * 10.0) / 10.0;
  char buf[32];
  if (std::abs(rounded - std::round(rounded)) < 1e-9) {
    std::snprintf(buf, sizeof buf, "%.0f", rounded);
  } else {
    std::snprintf(buf, sizeof buf, "%.1f", rounded);
  }
  return buf;
}

std::vector<SuccessTableRow> success_rows(const sim::SuccessTable& table) {
  std::vector<SuccessTableRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    rows.push_back({std::to_string(r.experiment), std::to_string(r.tests), r.subject,
                    format_percent(r.rate())});
  }
  return rows;
}

std::string render_success_table(const std::vector<SuccessTableRow>& rows) {
  std::string out = "Results of experiments, number of tests and success rate\n\n";
  out += "| Experiment | Number Tests | Tests Subject | Success rate |\n";
  out += "|---|---|---|---|\n";
  for (const auto& r : rows) {
    out += "| " + r.experiment + " | " + r.tests + " | " + r.subject + " | " + r.rate + "% |\n";
  }
  return out;
}

void write_eval_report_json(const std::filesystem::path& path, const eval::EvalReport& report) {
  json categories = json::array();
  for (Category c : all_categories()) {
    const auto i = static_cast<std::size_t>(index_of(c));
    json entry = {{"name", std::string(to_string(c))},
                  {"index", index_of(c)},
                  {"gt_count", report.gt_count[i]}};
    if (report.ap50[i]) {
      entry["ap50"] = *report.ap50[i];
    } else {
      entry["ap50"] = nullptr;
    }
    categories.push_back(std::move(entry));
  }
  json obj = {{"schema_version", 1},
              {"iou_threshold", report.iou_threshold},
              {"images", report.images},
              {"averaging", report.averaging},
              {"categories", std::move(categories)},
              {"map50", report.map50}};
  if (report.best_f1) {
    obj["best_f1"] = {{"confidence", report.best_f1->confidence}, {"f1", report.best_f1->f1}};
  } else {
    obj["best_f1"] = nullptr;
  }
  write_file(path, obj.dump(2) + "\n");
}

eval::EvalReport read_eval_report_json(const std::filesystem::path& path) {
  const json obj = json::parse(read_file(path), nullptr, false);
  if (obj.is_discarded()) throw ParseError("bad JSON in " + path.string());
  eval::EvalReport report;
  try {
    report.iou_threshold = obj.at("iou_threshold").get<double>();
    report.images = obj.at("images").get<int>();
    report.averaging = obj.at("averaging").get<std::string>();
    report.map50 = obj.at("map50").get<double>();
    for (const json& entry : obj.at("categories")) {
      const auto i = static_cast<std::size_t>(entry.at("index").get<int>());
      report.gt_count.at(i) = entry.at("gt_count").get<int>();
      if (!entry.at("ap50").is_null()) report.ap50.at(i) = entry.at("ap50").get<double>();
    }
    if (!obj.at("best_f1").is_null()) {
      report.best_f1 = eval::BestF1{obj["best_f1"].at("confidence").get<double>(),
                                    obj["best_f1"].at("f1").get<double>()};
    }
  } catch (const std::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return report;
}

std::string format_curves_csv(const std::vector<eval::CurveSeries>& series) {
  std::string out = "label,x,y\n";
  char buf[80];
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f\n", s.label.c_str(), p.x, p.y);
      out += buf;
    }
  }
  return out;
}

void write_curves_csv(const std::filesystem::path& path,
                      const std::vector<eval::CurveSeries>& series) {
  write_file(path, format_curves_csv(series));
}

std::string format_success_csv(const sim::SuccessTable& table) {
  std::string out = "experiment,number_tests,tests_subject,success_rate\n";
  for (const auto& row : success_rows(table)) {
    out += row.experiment + "," + row.tests + "," + row.subject + "," + row.rate + "\n";
  }
  return out;
}

void write_success_csv(const std::filesystem::path& path, const sim::SuccessTable& table) {
  write_file(path, format_success_csv(table));
}

std::vector<SuccessTableRow> read_success_csv(const std::filesystem::path& path) {
  std::istringstream stream(read_file(path));
  std::string line;
  if (!std::getline(stream, line) || line != "experiment,number_tests,tests_subject,success_rate") {
    throw ParseError(path.string() + ": bad success-table header");
  }
  std::vector<SuccessTableRow> rows;
  int line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty()) continue;
    SuccessTableRow row;
    std::string* fields[4] = {&row.experiment, &row.tests, &row.subject, &row.rate};
    std::size_t start = 0;
    for (int f = 0; f < 4; ++f) {
      const std::size_t comma = line.find(',', start);
      if (f < 3 && comma == std::string::npos) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
      }
      *fields[f] = line.substr(start, comma == std::string::npos ? comma : comma - start);
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_bus_stats_json(const std::filesystem::path& path, const bus::BusStats& stats) {
  write_file(path, stats_to_json(stats).dump(2) + "\n");
}

std::string format_trial_jsonl(const sim::TrialOutcome& outcome) {
  std::string out;
  const json header = {{"type", "trial"},
                       {"schema_version", 1},
                       {"experiment", outcome.experiment},
                       {"seed", outcome.seed},
                       {"frames", outcome.transcript.frames},
                       {"protocol",
                        {{"duration_s", outcome.protocol.duration_s},
                         {"frame_rate", outcome.protocol.frame_rate},
                         {"stop_window_s", outcome.protocol.stop_window_s},
                         {"confirm_frames", outcome.protocol.confirm_frames},
                         {"clear_frames", outcome.protocol.clear_frames}}}};
  out += header.dump();
  out += '\n';

  // Chronological transcript: per frame, the frame summary, then the
  // transitions it confirmed, the alerts, and the command it produced.
  const pipeline::Transcript& t = outcome.transcript;
  std::size_t ei = 0;
  std::size_t ai = 0;
  std::size_t ci = 0;
  for (const auto& frame : t.frame_log) {
    out += json{{"type", "frame"},
                {"frame_id", frame.frame_id},
                {"timestamp", frame.timestamp},
                {"detections", frame.detections},
                {"hazards", frame.hazards}}
               .dump();
    out += '\n';
    while (ei < t.events.size() && t.events[ei].event.frame_id <= frame.frame_id) {
      out += event_to_json(t.events[ei++]).dump();
      out += '\n';
    }
    while (ai < t.alerts.size() && t.alerts[ai].frame_id <= frame.frame_id) {
      out += alert_to_json(t.alerts[ai++]).dump();
      out += '\n';
    }
    while (ci < t.commands.size() && t.commands[ci].frame_id <= frame.frame_id) {
      out += command_to_json(t.commands[ci++]).dump();
      out += '\n';
    }
  }
  json tail = {{"type", "outcome"},
               {"success", outcome.success},
               {"failure_reason", outcome.failure_reason},
               {"bus", stats_to_json(outcome.transcript.stats)}};
  out += tail.dump();
  out += '\n';
  return out;
}

void write_trial_jsonl(const std::filesystem::path& path, const sim::TrialOutcome& outcome) {
  write_file(path, format_trial_jsonl(outcome));
}

void write_alert_log_jsonl(const std::filesystem::path& path,
                           const std::vector<pipeline::AlertRecord>& alerts) {
  std::string out;
  for (const auto& a : alerts) {
    out += alert_to_json(a).dump();
    out += '\n';
  }
  write_file(path, out);
}

void write_command_log_jsonl(const std::filesystem::path& path,
                             const std::vector<pipeline::CommandRecord>& commands) {
  std::string out;
  for (const auto& c : commands) {
    out += command_to_json(c).dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<ModelApRow> read_model_ap_json(const std::filesystem::path& path) {
  const json obj = json::parse(read_file(path), nullptr, false);
  if (obj.is_discarded()) throw ParseError("bad JSON in " + path.string());
  std::vector<ModelApRow> models;
  try {
    for (const json& m : obj.at("models")) {
      ModelApRow row;
      row.name = m.at("name").get<std::string>();
      for (const auto& [name, value] : m.at("ap50").items()) {
        const auto category = category_from_name(name);
        if (!category) throw ParseError(path.string() + ": unknown category '" + name + "'");
        row.ap50[static_cast<std::size_t>(index_of(*category))] = value.get<double>();
      }
      models.push_back(std::move(row));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return models;
}

void write_model_ap_json(const std::filesystem::path& path,
                         const std::vector<ModelApRow>& models) {
  json list = json::array();
  for (const auto& m : models) {
    json ap;
    for (Category c : all_categories()) {
      const auto& v = m.ap50[static_cast<std::size_t>(index_of(c))];
      if (v) ap[std::string(to_string(c))] = *v;
    }
    list.push_back({{"name", m.name}, {"ap50", std::move(ap)}});
  }
  write_file(path, json{{"schema_version", 1}, {"models", std::move(list)}}.dump(2) + "\n");
}

}  // namespace sitewatch::io
