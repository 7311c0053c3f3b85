#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sitewatch/pipeline.hpp"
#include "sitewatch/types.hpp"

namespace sitewatch::sim {

/// One test subject: where it stands or walks and whether it wears the
/// equipment. Equipped subjects carry Hardhat + Safety Vest ground truth,
/// unequipped ones NO-Hardhat + NO-Safety Vest.
struct SubjectProfile {
  bool equipped = true;
  bool moving = false;
  std::vector<fsm::Waypoint> path;  // meters, inside the area; >= 2 points when moving
  double speed = 0.4;               // m/s along the path (ping-pong)
  double body_width = 0.18;         // person box size, image fractions
  double body_height = 0.45;
};

/// One of the five trial types.
struct Scenario {
  int experiment = 1;
  std::vector<SubjectProfile> subjects;
  double duration_s = 30.0;
  double frame_rate = 5.0;
  double area_width = 2.0;   // meters; the camera view maps the area to the
  double area_height = 3.0;  // unit image
  void validate() const;  // throws std::invalid_argument
};

/// Builds the scenario for experiment 1..5: 1/2 static, 3/4 moving, 2/4
/// unequipped, 5 a mixed pair. Throws std::invalid_argument on other ids.
Scenario scenario_for(int experiment, double duration_s = 30.0, double frame_rate = 5.0);

/// Subject position (meters) at time t: fixed for static subjects, ping-pong
/// along the path at the configured speed for moving ones.
fsm::Waypoint subject_position(const Scenario& scenario, std::size_t subject, double t);

/// Person box (image fractions) of one subject at time t.
BBox person_box_at(const Scenario& scenario, std::size_t subject, double t);

/// Ground-truth frame k: one Person box per subject plus the equipment or
/// violation boxes nested inside it, all with confidence 1.
FramePacket gt_frame(const Scenario& scenario, std::int64_t k);

std::vector<FramePacket> render_gt_frames(const Scenario& scenario);

std::int64_t frame_count(const Scenario& scenario);

/// Detector imperfection model. Identical seeds give identical streams.
struct NoiseModel {
  std::array<double, kCategoryCount> miss_prob{};  // per-category drop chance
  double spurious_rate = 0.0;       // expected spurious boxes per frame (Poisson)
  double confidence_base = 1.0;     // sampled confidence = base +- jitter
  double confidence_jitter = 0.0;
  double center_jitter_sigma = 0.0;  // gaussian, image fractions
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }
  void validate() const;

  /// Raises the hardhat-related miss probabilities, mirroring a subject the
  /// detector finds harder to recognize.
  NoiseModel with_hard_subject(double hardhat_miss_bump = 0.25) const;
};

/// Applies the noise model to one ground-truth frame: boxes drop i.i.d. per
/// category, survivors get jittered centers and sampled confidences, spurious
/// boxes appear at the configured rate.
FramePacket simulate_detector(const FramePacket& gt, const NoiseModel& noise,
                              std::mt19937_64& rng);

struct TrialParams {
  pipeline::PipelineConfig pipeline;
  double stop_window_s = 3.0;  // allowed stop latency after a Raised transition
};

/// The constants a trial ran under; carried into every transcript so runs
/// are self-describing.
struct ProtocolInfo {
  double duration_s = 30.0;
  double frame_rate = 5.0;
  double stop_window_s = 3.0;
  int confirm_frames = 3;
  int clear_frames = 5;
};

struct TrialOutcome {
  bool success = false;
  std::string failure_reason;  // empty on success
  int experiment = 0;
  std::uint64_t seed = 0;
  ProtocolInfo protocol;
  pipeline::Transcript transcript;
};

/// Runs one trial through the full deterministic pipeline and judges it:
/// scenarios with an unequipped subject succeed when a correct-kind event is
/// raised for that subject and a zero-velocity command follows within the
/// stop window, with no event raised against an equipped subject;
/// equipped-only scenarios succeed exactly when no alert fires at all.
TrialOutcome run_trial(const Scenario& scenario, const NoiseModel& noise,
                       const TrialParams& params, std::uint64_t seed);

struct SuccessRow {
  int experiment;
  int tests;
  std::string subject;  // profile label, e.g. "default" or "default and default"
  int successes;
  double rate() const { return tests == 0 ? 0.0 : static_cast<double>(successes) / tests; }
};

struct SuccessTable {
  std::vector<SuccessRow> rows;
};

/// Per-trial seed derivation, deterministic in (base, experiment, trial).
std::uint64_t trial_seed(std::uint64_t base, int experiment, int trial);

struct TableRequest {
  std::vector<int> experiments;  // e.g. {1,2,3,4,5}
  int trials = 6;
  std::uint64_t seed = 7;
  std::string subject_profile = "default";  // "default" | "hard-subject"
  double duration_s = 30.0;
  double frame_rate = 5.0;
};

struct TableResult {
  SuccessTable table;
  std::vector<TrialOutcome> outcomes;  // in (experiment, trial) order
};

TableResult success_table(const TableRequest& request, const NoiseModel& noise,
                          const TrialParams& params);

}  // namespace sitewatch::sim
