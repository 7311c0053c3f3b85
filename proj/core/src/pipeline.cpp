#include "sitewatch/pipeline.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "sitewatch/errors.hpp"

namespace sitewatch::pipeline {

Pipeline::Pipeline(const PipelineConfig& cfg) : cfg_(cfg) {
  detections_topic_ =
      bus_.create_topic("detections", bus::PayloadKind::FramePacket, cfg.queue_capacity);
  events_topic_ = bus_.create_topic("risk_events", bus::PayloadKind::RiskEvent, cfg.queue_capacity);
  commands_topic_ =
      bus_.create_topic("cmd_vel", bus::PayloadKind::ActuationCommand, cfg.queue_capacity);
  alerts_topic_ = bus_.create_topic("alerts", bus::PayloadKind::AlertMessage, cfg.queue_capacity);

  engine_ = std::make_unique<risk::RiskEngine>(cfg.risk);
  fsm_ = std::make_unique<fsm::BehaviorFsm>(cfg.plan, cfg.fsm);

  // Decision node: detections in, confirmed risk transitions out.
  bus_.add_node("risk", {detections_topic_}, {events_topic_},
                [this](bus::TopicId, const bus::Payload& payload) {
                  const auto& frame = std::get<FramePacket>(payload);
                  std::vector<bus::Publication> out;
                  const auto transitions = engine_->process(frame);
                  transcript_.frame_log.push_back({frame.frame_id, frame.timestamp,
                                                   frame.detections.size(),
                                                   engine_->hazards().size()});
                  for (const risk::RiskEvent& event : transitions) {
                    EventRecord rec{event, std::nullopt};
                    for (const auto& a : engine_->assessments()) {
                      if (a.subject == event.subject) {
                        rec.subject_box = a.person_box;
                        break;
                      }
                    }
                    transcript_.events.push_back(rec);
                    out.push_back({events_topic_, event});
                  }
                  return out;
                });

  // Behavior node: buffers transitions, steps once per frame tick. Relies on
  // registration order (risk before behavior) so the transitions of a frame
  // arrive before that frame's tick.
  bus_.add_node("behavior", {events_topic_, detections_topic_},
                {commands_topic_, alerts_topic_},
                [this, inbox = std::vector<risk::RiskEvent>{}](
                    bus::TopicId source, const bus::Payload& payload) mutable {
                  std::vector<bus::Publication> out;
                  if (source == events_topic_) {
                    inbox.push_back(std::get<risk::RiskEvent>(payload));
                    return out;
                  }
                  const auto& frame = std::get<FramePacket>(payload);
                  fsm::ActuationCommand cmd = fsm_->step(frame.timestamp, inbox);
                  inbox.clear();
                  transcript_.commands.push_back({frame.frame_id, frame.timestamp, cmd.linear,
                                                  cmd.angular, fsm_->mode(), cmd.alerts.size()});
                  for (fsm::AlertMessage& alert : cmd.alerts) {
                    out.push_back({alerts_topic_, std::move(alert)});
                  }
                  out.push_back({commands_topic_, std::move(cmd)});
                  return out;
                });

  command_sink_ = bus_.subscribe(commands_topic_);
  alert_sink_ = bus_.subscribe(alerts_topic_);
}

void Pipeline::set_alert_hook(std::function<void(const AlertRecord&)> hook) {
  alert_hook_ = std::move(hook);
}

void Pipeline::feed(const FramePacket& frame) {
  if (last_frame_ && frame.frame_id <= *last_frame_) {
    throw StreamError("pipeline: frame id " + std::to_string(frame.frame_id) + " not after " +
                      std::to_string(*last_frame_));
  }
  if (last_timestamp_ && frame.timestamp <= *last_timestamp_) {
    throw StreamError("pipeline: timestamp not increasing at frame " +
                      std::to_string(frame.frame_id));
  }
  last_frame_ = frame.frame_id;
  last_timestamp_ = frame.timestamp;
  current_frame_ = frame.frame_id;
  current_time_ = frame.timestamp;

  bus_.publish(detections_topic_, frame);
  bus_.pump();
  drain_sinks();
  ++transcript_.frames;
}

void Pipeline::drain_sinks() {
  while (auto payload = bus_.try_pop(alert_sink_)) {
    const auto& msg = std::get<fsm::AlertMessage>(*payload);
    AlertRecord rec{current_frame_, current_time_, msg.text, msg.event.kind, msg.event.subject};
    transcript_.alerts.push_back(rec);
    if (alert_hook_) alert_hook_(rec);
  }
  while (bus_.try_pop(command_sink_)) {
    // Command records are written by the behavior node; the sink only
    // completes the delivery accounting.
  }
}

Transcript Pipeline::take_transcript() {
  transcript_.stats = bus_.stats();
  return std::move(transcript_);
}

}  // namespace sitewatch::pipeline
