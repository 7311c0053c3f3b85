#include "sitewatch/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

#include "sitewatch/errors.hpp"

namespace sitewatch::risk {

Category violation_category(EquipmentKind kind) {
  switch (kind) {
    case EquipmentKind::Hardhat: return Category::NoHardhat;
    case EquipmentKind::Mask: return Category::NoMask;
    case EquipmentKind::SafetyVest: return Category::NoSafetyVest;
  }
  throw std::invalid_argument("violation_category: bad equipment kind");
}

std::optional<std::pair<EquipmentKind, bool>> equipment_of(Category c) {
  switch (c) {
    case Category::Hardhat: return {{EquipmentKind::Hardhat, false}};
    case Category::NoHardhat: return {{EquipmentKind::Hardhat, true}};
    case Category::Mask: return {{EquipmentKind::Mask, false}};
    case Category::NoMask: return {{EquipmentKind::Mask, true}};
    case Category::SafetyVest: return {{EquipmentKind::SafetyVest, false}};
    case Category::NoSafetyVest: return {{EquipmentKind::SafetyVest, true}};
    default: return std::nullopt;
  }
}

void RiskConfig::validate() const {
  if (!(confidence_floor > 0.0 && confidence_floor < 1.0)) {
    throw std::invalid_argument("RiskConfig: confidence_floor must lie in (0,1)");
  }
  if (!(association_overlap_min > 0.0 && association_overlap_min <= 1.0)) {
    throw std::invalid_argument("RiskConfig: association_overlap_min must lie in (0,1]");
  }
  if (confirm_frames < 1) throw std::invalid_argument("RiskConfig: confirm_frames must be >= 1");
  if (clear_frames < 1) throw std::invalid_argument("RiskConfig: clear_frames must be >= 1");
  if (!(track_gate > 0.0)) throw std::invalid_argument("RiskConfig: track_gate must be positive");
}

std::vector<SubjectAssessment> associate(const FramePacket& frame, const RiskConfig& cfg) {
  std::vector<SubjectAssessment> assessments;
  std::vector<std::size_t> person_index;  // detection index per assessment

  for (std::size_t i = 0; i < frame.detections.size(); ++i) {
    const Detection& det = frame.detections[i];
    if (det.confidence < cfg.confidence_floor) continue;
    if (det.category != Category::Person) continue;
    SubjectAssessment a;
    a.subject = static_cast<int>(assessments.size());
    a.person_box = det.box;
    a.person_confidence = det.confidence;
    a.supporting.push_back(i);
    assessments.push_back(std::move(a));
    person_index.push_back(i);
  }

  // Best equipment evidence seen so far, per (person, equipment type).
  struct Evidence {
    double confidence = -1.0;
    bool violation = false;
  };
  std::vector<std::array<Evidence, kEquipmentKinds>> evidence(assessments.size());

  for (std::size_t i = 0; i < frame.detections.size(); ++i) {
    const Detection& det = frame.detections[i];
    if (det.confidence < cfg.confidence_floor) continue;
    const auto equip = equipment_of(det.category);
    if (!equip) continue;

    double best_overlap = 0.0;
    int best_person = -1;
    for (std::size_t p = 0; p < assessments.size(); ++p) {
      const double overlap = overlap_over_smaller(det.box, assessments[p].person_box);
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best_person = static_cast<int>(p);
      }
    }
    if (best_person < 0 || best_overlap < cfg.association_overlap_min) continue;  // discard

    assessments[static_cast<std::size_t>(best_person)].supporting.push_back(i);
    auto& slot = evidence[static_cast<std::size_t>(best_person)][static_cast<int>(equip->first)];
    const bool stronger = det.confidence > slot.confidence ||
                          (det.confidence == slot.confidence && equip->second && !slot.violation);
    if (stronger) slot = {det.confidence, equip->second};
  }

  for (std::size_t p = 0; p < assessments.size(); ++p) {
    for (int k = 0; k < kEquipmentKinds; ++k) {
      const Evidence& slot = evidence[p][k];
      if (slot.confidence < 0.0) continue;  // stays Unknown
      assessments[p].equipment[k] =
          slot.violation ? EquipmentStatus::Violation : EquipmentStatus::Present;
    }
  }
  return assessments;
}

std::vector<Hazard> evaluate(std::span<const SubjectAssessment> assessments,
                             const RiskConfig& cfg) {
  std::vector<Hazard> hazards;
  for (const auto& a : assessments) {
    for (int k = 0; k < kEquipmentKinds; ++k) {
      if (a.equipment[k] != EquipmentStatus::Violation) continue;
      const auto kind = static_cast<EquipmentKind>(k);
      if (kind == EquipmentKind::Mask && !cfg.monitor_mask) continue;
      hazards.push_back({a.subject, violation_category(kind)});
    }
  }
  std::sort(hazards.begin(), hazards.end());
  return hazards;
}

DebounceTracker::DebounceTracker(int confirm_frames, int clear_frames)
    : confirm_frames_(confirm_frames), clear_frames_(clear_frames) {
  if (confirm_frames < 1 || clear_frames < 1) {
    throw std::invalid_argument("DebounceTracker: frame counts must be >= 1");
  }
}

std::vector<RiskEvent> DebounceTracker::update(std::span<const Hazard> hazards,
                                               std::int64_t frame_id, double timestamp) {
  if (last_frame_ && frame_id <= *last_frame_) {
    throw StreamError("debounce: frame id " + std::to_string(frame_id) +
                      " not after " + std::to_string(*last_frame_));
  }
  last_frame_ = frame_id;

  std::vector<RiskEvent> events;
  auto has_hazard = [&](const std::pair<int, int>& key) {
    return std::any_of(hazards.begin(), hazards.end(), [&](const Hazard& h) {
      return h.subject == key.first && index_of(h.kind) == key.second;
    });
  };

  // Advance existing cells; absent hazards break streaks / progress clears.
  for (auto it = cells_.begin(); it != cells_.end();) {
    if (has_hazard(it->first)) {
      ++it;
      continue;
    }
    Cell& cell = it->second;
    cell.hazard_streak = 0;
    if (!cell.raised) {
      it = cells_.erase(it);
      continue;
    }
    if (++cell.clear_streak >= clear_frames_) {
      events.push_back({category_from_index(it->first.second), frame_id, timestamp,
                        it->first.first, RiskEventState::Cleared});
      it = cells_.erase(it);
    } else {
      ++it;
    }
  }

  for (const Hazard& h : hazards) {
    Cell& cell = cells_[{h.subject, index_of(h.kind)}];
    cell.clear_streak = 0;
    if (cell.hazard_streak < confirm_frames_) ++cell.hazard_streak;
    if (!cell.raised && cell.hazard_streak >= confirm_frames_) {
      cell.raised = true;
      events.push_back({h.kind, frame_id, timestamp, h.subject, RiskEventState::Raised});
    }
  }

  std::sort(events.begin(), events.end(), [](const RiskEvent& a, const RiskEvent& b) {
    return std::tuple(a.subject, index_of(a.kind), a.state == RiskEventState::Raised) <
           std::tuple(b.subject, index_of(b.kind), b.state == RiskEventState::Raised);
  });
  return events;
}

RiskEngine::RiskEngine(RiskConfig cfg)
    : cfg_(cfg), debounce_(cfg.confirm_frames, cfg.clear_frames) {
  cfg_.validate();
}

void RiskEngine::link_subjects(std::vector<SubjectAssessment>& assessments) {
  // Nearest-centroid matching against the previous frame, greedy by distance.
  struct Candidate {
    double dist;
    std::size_t cur;
    std::size_t prev;
  };
  std::vector<Candidate> candidates;
  for (std::size_t c = 0; c < assessments.size(); ++c) {
    for (std::size_t p = 0; p < tracks_.size(); ++p) {
      const double dx = assessments[c].person_box.cx - tracks_[p].cx;
      const double dy = assessments[c].person_box.cy - tracks_[p].cy;
      const double dist = std::hypot(dx, dy);
      if (dist <= cfg_.track_gate) candidates.push_back({dist, c, p});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tuple(a.dist, a.cur, a.prev) < std::tuple(b.dist, b.cur, b.prev);
  });

  std::vector<bool> cur_done(assessments.size(), false);
  std::vector<bool> prev_done(tracks_.size(), false);
  for (const auto& cand : candidates) {
    if (cur_done[cand.cur] || prev_done[cand.prev]) continue;
    assessments[cand.cur].subject = tracks_[cand.prev].id;
    cur_done[cand.cur] = true;
    prev_done[cand.prev] = true;
  }
  for (std::size_t c = 0; c < assessments.size(); ++c) {
    if (!cur_done[c]) assessments[c].subject = next_subject_++;
  }

  tracks_.clear();
  for (const auto& a : assessments) {
    tracks_.push_back({a.subject, a.person_box.cx, a.person_box.cy});
  }
}

std::vector<RiskEvent> RiskEngine::process(const FramePacket& frame) {
  if (last_frame_ && frame.frame_id <= *last_frame_) {
    throw StreamError("risk engine: frame id " + std::to_string(frame.frame_id) +
                      " not after " + std::to_string(*last_frame_));
  }
  last_frame_ = frame.frame_id;

  assessments_ = associate(frame, cfg_);
  link_subjects(assessments_);
  hazards_ = evaluate(assessments_, cfg_);
  return debounce_.update(hazards_, frame.frame_id, frame.timestamp);
}

}  // namespace sitewatch::risk
