#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sitewatch/behavior.hpp"
#include "sitewatch/bus.hpp"
#include "sitewatch/risk.hpp"

namespace sitewatch::pipeline {

struct PipelineConfig {
  risk::RiskConfig risk;
  fsm::FsmConfig fsm;
  fsm::PatrolPlan plan = fsm::PatrolPlan::standard();
  std::size_t queue_capacity = 16;
};

struct FrameRecord {
  std::int64_t frame_id;
  double timestamp;
  std::size_t detections;
  std::size_t hazards;  // instantaneous, pre-debounce
};

struct EventRecord {
  risk::RiskEvent event;
  std::optional<BBox> subject_box;  // person box at the transition frame
};

struct AlertRecord {
  std::int64_t frame_id;
  double timestamp;
  std::string text;
  Category kind;
  int subject;
};

struct CommandRecord {
  std::int64_t frame_id;
  double timestamp;
  double linear;
  double angular;
  fsm::Mode mode;
  std::size_t alerts;
};

struct Transcript {
  std::vector<FrameRecord> frame_log;
  std::vector<EventRecord> events;
  std::vector<AlertRecord> alerts;
  std::vector<CommandRecord> commands;
  bus::BusStats stats;
  std::int64_t frames = 0;
};

/// The default node graph: a detections topic feeding the risk engine, whose
/// transitions feed the behavior FSM, which publishes movement commands and
/// alerts. Frames are pumped deterministically one at a time.
class Pipeline {
 public:
  explicit Pipeline(const PipelineConfig& cfg);

  /// Feeds one frame and pumps to quiescence. Frame ids and timestamps must
  /// be strictly increasing (StreamError).
  void feed(const FramePacket& frame);

  /// Optional hook invoked for every alert as it is consumed.
  void set_alert_hook(std::function<void(const AlertRecord&)> hook);

  const Transcript& transcript() const { return transcript_; }
  Transcript take_transcript();

 private:
  void drain_sinks();

  PipelineConfig cfg_;
  bus::Bus bus_;
  bus::TopicId detections_topic_;
  bus::TopicId events_topic_;
  bus::TopicId commands_topic_;
  bus::TopicId alerts_topic_;
  bus::SubscriptionId command_sink_;
  bus::SubscriptionId alert_sink_;
  std::unique_ptr<risk::RiskEngine> engine_;
  std::unique_ptr<fsm::BehaviorFsm> fsm_;
  std::function<void(const AlertRecord&)> alert_hook_;
  std::optional<std::int64_t> last_frame_;
  std::optional<double> last_timestamp_;
  std::int64_t current_frame_ = 0;
  double current_time_ = 0.0;
  Transcript transcript_;
};

}  // namespace sitewatch::pipeline
