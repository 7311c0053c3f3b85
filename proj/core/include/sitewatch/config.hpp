#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sitewatch/pipeline.hpp"
#include "sitewatch/sim.hpp"

namespace sitewatch::io {

/// Everything the CLI commands can tune, with documented defaults. Loaded
/// from a flat `key = value` text file; unknown keys are rejected by name.
struct RunConfig {
  std::uint64_t seed = 7;
  std::size_t bus_queue_capacity = 16;

  risk::RiskConfig risk;     // confidence floor 0.5, overlap 0.25, N=3, M=5
  fsm::FsmConfig fsm;        // v_max 0.3, w_max 1.0, 10 Hz, capture 0.1 m
  double area_width = 2.0;   // meters
  double area_height = 3.0;
  double cruise_speed = 0.25;

  sim::NoiseModel noise;     // zero noise: detections = ground truth, conf 1
  double sim_duration_s = 30.0;
  double sim_frame_rate = 5.0;
  double stop_window_s = 3.0;
  double subject_speed = 0.4;
  std::string subject_profile = "default";  // or "hard-subject"

  std::string alert_command;  // external alert hook; empty = disabled

  pipeline::PipelineConfig pipeline_config() const;
  sim::TrialParams trial_params() const;
};

/// Parses a config file on top of the defaults. Throws ConfigError naming the
/// offending key for unknown keys or unparseable values.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// The full key set with default values, as config-file text.
std::string default_config_text();

}  // namespace sitewatch::io
