#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sitewatch/types.hpp"

namespace sitewatch::risk {

enum class EquipmentKind : int { Hardhat = 0, Mask = 1, SafetyVest = 2 };
inline constexpr int kEquipmentKinds = 3;

enum class EquipmentStatus { Unknown, Present, Violation };

/// The violation category reported for a given equipment type.
Category violation_category(EquipmentKind kind);

/// Maps the six PPE categories onto (equipment type, is-violation);
/// nullopt for Person / Safety Cone / Machinery / Vehicle.
std::optional<std::pair<EquipmentKind, bool>> equipment_of(Category c);

struct RiskConfig {
  double confidence_floor = 0.5;
  double association_overlap_min = 0.25;
  int confirm_frames = 3;  // N consecutive hazard frames to raise
  int clear_frames = 5;    // M consecutive hazard-free frames to clear
  bool monitor_mask = false;  // default rules alert on hardhat/vest only
  double track_gate = 0.2;    // centroid link gate, normalized units

  void validate() const;  // throws std::invalid_argument
};

/// One person detection with the equipment evidence attached to it.
struct SubjectAssessment {
  int subject = -1;  // persistent id from the engine; frame index in associate()
  BBox person_box;
  double person_confidence = 0.0;
  std::array<EquipmentStatus, kEquipmentKinds> equipment{
      EquipmentStatus::Unknown, EquipmentStatus::Unknown, EquipmentStatus::Unknown};
  std::vector<std::size_t> supporting;  // indices into the frame's detections
};

/// Associates equipment/violation detections to person boxes: detections below
/// the confidence floor are ignored; each equipment box attaches to the person
/// maximizing overlap_over_smaller when that overlap reaches the minimum, and
/// is discarded otherwise. Competing evidence for one equipment type resolves
/// to the higher-confidence detection (violation wins exact ties).
std::vector<SubjectAssessment> associate(const FramePacket& frame, const RiskConfig& cfg);

struct Hazard {
  int subject;
  Category kind;  // violation category
  friend auto operator<=>(const Hazard&, const Hazard&) = default;
};

/// Instantaneous hazards: one per (subject, equipment type) with status
/// Violation. Unknown never yields a hazard. Mask hazards only when enabled.
std::vector<Hazard> evaluate(std::span<const SubjectAssessment> assessments,
                             const RiskConfig& cfg);

enum class RiskEventState { Raised, Cleared };

/// A confirmed, debounced violation transition. frame_id/timestamp are the
/// transition frame: the Nth consecutive hazard frame for Raised, the Mth
/// consecutive hazard-free frame for Cleared.
struct RiskEvent {
  Category kind = Category::NoHardhat;
  std::int64_t frame_id = 0;
  double timestamp = 0.0;
  int subject = 0;
  RiskEventState state = RiskEventState::Raised;
};

/// The N/M counter automaton, keyed by (subject, kind). Frames must be
/// presented with strictly increasing ids (StreamError otherwise).
class DebounceTracker {
 public:
  DebounceTracker(int confirm_frames, int clear_frames);

  std::vector<RiskEvent> update(std::span<const Hazard> hazards, std::int64_t frame_id,
                                double timestamp);

 private:
  struct Cell {
    int hazard_streak = 0;
    int clear_streak = 0;
    bool raised = false;
  };
  int confirm_frames_;
  int clear_frames_;
  std::optional<std::int64_t> last_frame_;
  std::map<std::pair<int, int>, Cell> cells_;  // (subject, category index)
};

/// Stateful per-stream processor: tracks subject identity across frames
/// (nearest-centroid linking under the gate), associates and evaluates each
/// frame, and debounces hazards into RiskEvent transitions.
class RiskEngine {
 public:
  explicit RiskEngine(RiskConfig cfg);

  /// Processes one frame and returns the event transitions it produced.
  std::vector<RiskEvent> process(const FramePacket& frame);

  /// Assessments of the most recent frame, with persistent subject ids.
  const std::vector<SubjectAssessment>& assessments() const { return assessments_; }

  /// Instantaneous hazards of the most recent frame (pre-debounce).
  const std::vector<Hazard>& hazards() const { return hazards_; }

  const RiskConfig& config() const { return cfg_; }

 private:
  struct Track {
    int id;
    double cx, cy;
  };

  void link_subjects(std::vector<SubjectAssessment>& assessments);

  RiskConfig cfg_;
  DebounceTracker debounce_;
  std::optional<std::int64_t> last_frame_;
  std::vector<Track> tracks_;  // previous frame's persons
  std::vector<SubjectAssessment> assessments_;
  std::vector<Hazard> hazards_;
  int next_subject_ = 0;
};

}  // namespace sitewatch::risk
