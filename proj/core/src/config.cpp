#include "sitewatch/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sitewatch/errors.hpp"

namespace sitewatch::io {

namespace {

std::string trim(const std::string& s) {
  auto begin = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto end = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) {
               return std::isspace(c);
             }).base();
  return begin < end ? std::string(begin, end) : std::string();
}

// Config-key slugs for the per-category noise knobs.
constexpr std::array<std::string_view, kCategoryCount> kCategorySlugs = {
    "hardhat", "mask", "no_hardhat", "no_mask", "no_safety_vest",
    "person", "safety_cone", "safety_vest", "machinery", "vehicle"};

struct Setter {
  std::function<void(RunConfig&, const std::string&)> apply;
  std::function<std::string(const RunConfig&)> print;
};

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) throw ConfigError("config: bad value for " + key + ": '" + value + "'");
  return v;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size()) throw ConfigError("config: bad value for " + key + ": '" + value + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: bad value for " + key + ": '" + value + "'");
}

std::string print_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    auto add_double = [&m](const std::string& key, auto member) {
      m[key] = {[key, member](RunConfig& c, const std::string& v) { std::invoke(member, c) = to_double(key, v); },
                [member](const RunConfig& c) { return print_double(std::invoke(member, c)); }};
    };

    m["seed"] = {[](RunConfig& c, const std::string& v) {
                   c.seed = static_cast<std::uint64_t>(to_int("seed", v));
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }};
    m["bus.queue_capacity"] = {
        [](RunConfig& c, const std::string& v) {
          const auto n = to_int("bus.queue_capacity", v);
          if (n < 1) throw ConfigError("config: bus.queue_capacity must be >= 1");
          c.bus_queue_capacity = static_cast<std::size_t>(n);
        },
        [](const RunConfig& c) { return std::to_string(c.bus_queue_capacity); }};

    add_double("risk.confidence_floor", [](auto& c) -> auto& { return c.risk.confidence_floor; });
    add_double("risk.association_overlap_min",
               [](auto& c) -> auto& { return c.risk.association_overlap_min; });
    m["risk.confirm_frames"] = {[](RunConfig& c, const std::string& v) {
                                  c.risk.confirm_frames =
                                      static_cast<int>(to_int("risk.confirm_frames", v));
                                },
                                [](const RunConfig& c) {
                                  return std::to_string(c.risk.confirm_frames);
                                }};
    m["risk.clear_frames"] = {[](RunConfig& c, const std::string& v) {
                                c.risk.clear_frames =
                                    static_cast<int>(to_int("risk.clear_frames", v));
                              },
                              [](const RunConfig& c) {
                                return std::to_string(c.risk.clear_frames);
                              }};
    m["risk.monitor_mask"] = {[](RunConfig& c, const std::string& v) {
                                c.risk.monitor_mask = to_bool("risk.monitor_mask", v);
                              },
                              [](const RunConfig& c) {
                                return c.risk.monitor_mask ? "true" : "false";
                              }};
    add_double("risk.track_gate", [](auto& c) -> auto& { return c.risk.track_gate; });

    add_double("fsm.v_max", [](auto& c) -> auto& { return c.fsm.v_max; });
    add_double("fsm.w_max", [](auto& c) -> auto& { return c.fsm.w_max; });
    add_double("fsm.tick_rate", [](auto& c) -> auto& { return c.fsm.tick_rate; });
    add_double("fsm.capture_radius", [](auto& c) -> auto& { return c.fsm.capture_radius; });
    add_double("fsm.area_width", [](auto& c) -> auto& { return c.area_width; });
    add_double("fsm.area_height", [](auto& c) -> auto& { return c.area_height; });
    add_double("fsm.cruise_speed", [](auto& c) -> auto& { return c.cruise_speed; });

    for (int i = 0; i < kCategoryCount; ++i) {
      const std::string key = "noise.miss." + std::string(kCategorySlugs[static_cast<std::size_t>(i)]);
      m[key] = {[key, i](RunConfig& c, const std::string& v) {
                  c.noise.miss_prob[static_cast<std::size_t>(i)] = to_double(key, v);
                },
                [i](const RunConfig& c) {
                  return print_double(c.noise.miss_prob[static_cast<std::size_t>(i)]);
                }};
    }
    add_double("noise.spurious_rate", [](auto& c) -> auto& { return c.noise.spurious_rate; });
    add_double("noise.confidence_base", [](auto& c) -> auto& { return c.noise.confidence_base; });
    add_double("noise.confidence_jitter",
               [](auto& c) -> auto& { return c.noise.confidence_jitter; });
    add_double("noise.center_jitter_sigma",
               [](auto& c) -> auto& { return c.noise.center_jitter_sigma; });

    add_double("sim.duration_s", [](auto& c) -> auto& { return c.sim_duration_s; });
    add_double("sim.frame_rate", [](auto& c) -> auto& { return c.sim_frame_rate; });
    add_double("sim.stop_window_s", [](auto& c) -> auto& { return c.stop_window_s; });
    add_double("sim.subject_speed", [](auto& c) -> auto& { return c.subject_speed; });
    m["sim.subject_profile"] = {
        [](RunConfig& c, const std::string& v) {
          if (v != "default" && v != "hard-subject") {
            throw ConfigError("config: sim.subject_profile must be 'default' or 'hard-subject'");
          }
          c.subject_profile = v;
        },
        [](const RunConfig& c) { return c.subject_profile; }};

    m["alert.command"] = {[](RunConfig& c, const std::string& v) { c.alert_command = v; },
                          [](const RunConfig& c) { return c.alert_command; }};
    return m;
  }();
  return table;
}

}  // namespace

pipeline::PipelineConfig RunConfig::pipeline_config() const {
  pipeline::PipelineConfig cfg;
  cfg.risk = risk;
  cfg.fsm = fsm;
  cfg.plan = fsm::PatrolPlan::standard(area_width, area_height, cruise_speed);
  cfg.queue_capacity = bus_queue_capacity;
  return cfg;
}

sim::TrialParams RunConfig::trial_params() const {
  sim::TrialParams params;
  params.pipeline = pipeline_config();
  params.stop_window_s = stop_window_s;
  return params;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->second.apply(cfg, value);
  }
  try {
    cfg.risk.validate();
    cfg.fsm.validate();
    cfg.noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

std::string default_config_text() {
  const RunConfig defaults;
  std::string out;
  for (const auto& [key, setter] : setters()) {
    out += key;
    out += " = ";
    out += setter.print(defaults);
    out += '\n';
  }
  return out;
}

}  // namespace sitewatch::io
