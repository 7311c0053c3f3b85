#include "sitewatch/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace sitewatch::sim {

namespace {

constexpr double kAttributionMinIou = 0.2;

double path_length(const std::vector<fsm::Waypoint>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    len += std::hypot(path[i].x - path[i - 1].x, path[i].y - path[i - 1].y);
  }
  return len;
}

// Position after traveling `dist` along the polyline from its start.
fsm::Waypoint point_along(const std::vector<fsm::Waypoint>& path, double dist) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double seg = std::hypot(path[i].x - path[i - 1].x, path[i].y - path[i - 1].y);
    if (dist <= seg || i + 1 == path.size()) {
      const double f = seg == 0.0 ? 0.0 : std::clamp(dist / seg, 0.0, 1.0);
      return {path[i - 1].x + f * (path[i].x - path[i - 1].x),
              path[i - 1].y + f * (path[i].y - path[i - 1].y)};
    }
    dist -= seg;
  }
  return path.front();
}

// Nested equipment box geometry relative to a person box.
BBox hardhat_box(const BBox& person) {
  return BBox(person.cx, person.cy - 0.4 * person.h, 0.45 * person.w, 0.16 * person.h);
}

BBox vest_box(const BBox& person) {
  return BBox(person.cx, person.cy + 0.05 * person.h, 0.75 * person.w, 0.3 * person.h);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void Scenario::validate() const {
  if (experiment < 1 || experiment > 5) {
    throw std::invalid_argument("Scenario: experiment id must be 1..5");
  }
  if (experiment == 5) {
    if (subjects.size() != 2) throw std::invalid_argument("Scenario: experiment 5 needs 2 subjects");
    if (subjects[0].equipped == subjects[1].equipped) {
      throw std::invalid_argument("Scenario: experiment 5 needs one equipped, one not");
    }
  } else if (subjects.size() != 1) {
    throw std::invalid_argument("Scenario: experiments 1-4 need exactly 1 subject");
  }
  if (!(duration_s > 0.0) || !(frame_rate > 0.0)) {
    throw std::invalid_argument("Scenario: duration and frame rate must be positive");
  }
  for (const auto& s : subjects) {
    if (s.path.empty()) throw std::invalid_argument("Scenario: subject path is empty");
    if (s.moving && s.path.size() < 2) {
      throw std::invalid_argument("Scenario: moving subject needs >= 2 path points");
    }
    for (const auto& wp : s.path) {
      if (wp.x < 0.0 || wp.x > area_width || wp.y < 0.0 || wp.y > area_height) {
        throw std::invalid_argument("Scenario: subject path leaves the area");
      }
    }
  }
}

Scenario scenario_for(int experiment, double duration_s, double frame_rate) {
  if (experiment < 1 || experiment > 5) {
    throw std::invalid_argument("scenario_for: experiment id must be 1..5");
  }
  Scenario s;
  s.experiment = experiment;
  s.duration_s = duration_s;
  s.frame_rate = frame_rate;

  SubjectProfile subject;
  subject.equipped = experiment == 1 || experiment == 3;  // 2 and 4 are unequipped
  subject.moving = experiment == 3 || experiment == 4;
  if (subject.moving) {
    subject.path = {{0.5, 0.8}, {1.5, 2.2}};
  } else {
    subject.path = {{1.0, 1.5}};
  }

  if (experiment == 5) {
    SubjectProfile equipped;
    equipped.equipped = true;
    equipped.path = {{0.5, 0.8}};
    SubjectProfile unequipped;
    unequipped.equipped = false;
    unequipped.path = {{1.5, 2.2}};
    s.subjects = {equipped, unequipped};
  } else {
    s.subjects = {subject};
  }
  s.validate();
  return s;
}

fsm::Waypoint subject_position(const Scenario& scenario, std::size_t subject, double t) {
  const SubjectProfile& s = scenario.subjects.at(subject);
  if (!s.moving || s.path.size() < 2) return s.path.front();
  const double len = path_length(s.path);
  if (len == 0.0) return s.path.front();
  // Ping-pong along the path.
  const double period = 2.0 * len;
  double d = std::fmod(s.speed * t, period);
  if (d < 0.0) d += period;
  if (d > len) d = period - d;
  return point_along(s.path, d);
}

BBox person_box_at(const Scenario& scenario, std::size_t subject, double t) {
  const SubjectProfile& s = scenario.subjects.at(subject);
  const fsm::Waypoint pos = subject_position(scenario, subject, t);
  return BBox(pos.x / scenario.area_width, pos.y / scenario.area_height, s.body_width,
              s.body_height);
}

FramePacket gt_frame(const Scenario& scenario, std::int64_t k) {
  FramePacket frame;
  frame.frame_id = k;
  frame.timestamp = static_cast<double>(k) / scenario.frame_rate;
  for (std::size_t si = 0; si < scenario.subjects.size(); ++si) {
    const SubjectProfile& s = scenario.subjects[si];
    const BBox person = person_box_at(scenario, si, frame.timestamp);
    frame.detections.emplace_back(Category::Person, person, 1.0);
    if (s.equipped) {
      frame.detections.emplace_back(Category::Hardhat, hardhat_box(person), 1.0);
      frame.detections.emplace_back(Category::SafetyVest, vest_box(person), 1.0);
    } else {
      frame.detections.emplace_back(Category::NoHardhat, hardhat_box(person), 1.0);
      frame.detections.emplace_back(Category::NoSafetyVest, vest_box(person), 1.0);
    }
  }
  return frame;
}

std::int64_t frame_count(const Scenario& scenario) {
  return static_cast<std::int64_t>(std::llround(scenario.duration_s * scenario.frame_rate));
}

std::vector<FramePacket> render_gt_frames(const Scenario& scenario) {
  scenario.validate();
  std::vector<FramePacket> frames;
  const std::int64_t n = frame_count(scenario);
  frames.reserve(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) frames.push_back(gt_frame(scenario, k));
  return frames;
}

void NoiseModel::validate() const {
  for (double p : miss_prob) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("NoiseModel: miss probabilities must lie in [0,1]");
    }
  }
  if (spurious_rate < 0.0) throw std::invalid_argument("NoiseModel: spurious rate must be >= 0");
  if (!(confidence_base >= 0.0 && confidence_base <= 1.0) || confidence_jitter < 0.0 ||
      center_jitter_sigma < 0.0) {
    throw std::invalid_argument("NoiseModel: bad confidence/jitter parameters");
  }
}

NoiseModel NoiseModel::with_hard_subject(double hardhat_miss_bump) const {
  NoiseModel out = *this;
  auto bump = [&](Category c) {
    double& p = out.miss_prob[static_cast<std::size_t>(index_of(c))];
    p = std::min(1.0, p + hardhat_miss_bump);
  };
  bump(Category::Hardhat);
  bump(Category::NoHardhat);
  return out;
}

FramePacket simulate_detector(const FramePacket& gt, const NoiseModel& noise,
                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform01(0.0, 1.0);

  FramePacket out;
  out.frame_id = gt.frame_id;
  out.timestamp = gt.timestamp;

  for (const Detection& det : gt.detections) {
    const double p_miss = noise.miss_prob[static_cast<std::size_t>(index_of(det.category))];
    if (uniform01(rng) < p_miss) continue;

    double cx = det.box.cx;
    double cy = det.box.cy;
    if (noise.center_jitter_sigma > 0.0) {
      std::normal_distribution<double> jitter(0.0, noise.center_jitter_sigma);
      cx = std::clamp(cx + jitter(rng), 0.0, 1.0);
      cy = std::clamp(cy + jitter(rng), 0.0, 1.0);
    }
    double confidence = noise.confidence_base;
    if (noise.confidence_jitter > 0.0) {
      std::uniform_real_distribution<double> cj(-noise.confidence_jitter,
                                                noise.confidence_jitter);
      confidence = std::clamp(confidence + cj(rng), 0.0, 1.0);
    }
    out.detections.emplace_back(det.category, BBox(cx, cy, det.box.w, det.box.h), confidence);
  }

  if (noise.spurious_rate > 0.0) {
    std::poisson_distribution<int> count(noise.spurious_rate);
    const int spurious = count(rng);
    for (int i = 0; i < spurious; ++i) {
      const auto category = static_cast<Category>(
          std::uniform_int_distribution<int>(0, kCategoryCount - 1)(rng));
      const double cx = uniform01(rng);
      const double cy = uniform01(rng);
      std::uniform_real_distribution<double> size(0.02, 0.3);
      std::uniform_real_distribution<double> conf(0.25, 1.0);
      out.detections.emplace_back(category, BBox(cx, cy, size(rng), size(rng)), conf(rng));
    }
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t base, int experiment, int trial) {
  return splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(experiment) * 1000003ULL +
                                      static_cast<std::uint64_t>(trial)));
}

TrialOutcome run_trial(const Scenario& scenario, const NoiseModel& noise,
                       const TrialParams& params, std::uint64_t seed) {
  scenario.validate();
  noise.validate();

  TrialOutcome outcome;
  outcome.experiment = scenario.experiment;
  outcome.seed = seed;
  outcome.protocol = {scenario.duration_s, scenario.frame_rate, params.stop_window_s,
                      params.pipeline.risk.confirm_frames, params.pipeline.risk.clear_frames};

  pipeline::Pipeline pipe(params.pipeline);
  std::mt19937_64 rng(seed);
  const std::int64_t frames = frame_count(scenario);
  for (std::int64_t k = 0; k < frames; ++k) {
    pipe.feed(simulate_detector(gt_frame(scenario, k), noise, rng));
  }
  outcome.transcript = pipe.take_transcript();
  const pipeline::Transcript& t = outcome.transcript;

  // Attributes an event to the scenario subject whose ground-truth person box
  // best matches the assessed person box at the transition frame.
  auto attribute = [&](const pipeline::EventRecord& rec) -> int {
    if (!rec.subject_box) return -1;
    double best = kAttributionMinIou;
    int best_subject = -1;
    for (std::size_t si = 0; si < scenario.subjects.size(); ++si) {
      const double overlap =
          iou(*rec.subject_box, person_box_at(scenario, si, rec.event.timestamp));
      if (overlap > best) {
        best = overlap;
        best_subject = static_cast<int>(si);
      }
    }
    return best_subject;
  };

  const bool any_unequipped = std::any_of(scenario.subjects.begin(), scenario.subjects.end(),
                                          [](const SubjectProfile& s) { return !s.equipped; });
  const bool any_equipped = std::any_of(scenario.subjects.begin(), scenario.subjects.end(),
                                        [](const SubjectProfile& s) { return s.equipped; });

  if (!any_unequipped) {
    // Compliant trial: any alert at all is a failure.
    if (!t.alerts.empty()) {
      outcome.failure_reason = "false alert";
      return outcome;
    }
    outcome.success = true;
    return outcome;
  }

  // A violation is present: require a confirmed correct-kind event on the
  // unequipped subject ...
  std::optional<pipeline::EventRecord> confirmed;
  for (const auto& rec : t.events) {
    if (rec.event.state != risk::RiskEventState::Raised) continue;
    if (rec.event.kind != Category::NoHardhat && rec.event.kind != Category::NoSafetyVest) {
      continue;
    }
    const int subject = attribute(rec);
    if (subject >= 0 && !scenario.subjects[static_cast<std::size_t>(subject)].equipped) {
      confirmed = rec;
      break;
    }
  }
  if (!confirmed) {
    outcome.failure_reason = "no confirmed event";
    return outcome;
  }

  // ... a stop within the window ...
  bool stopped = false;
  for (const auto& cmd : t.commands) {
    if (cmd.timestamp < confirmed->event.timestamp) continue;
    if (cmd.timestamp - confirmed->event.timestamp > params.stop_window_s) break;
    if (cmd.linear == 0.0 && cmd.angular == 0.0) {
      stopped = true;
      break;
    }
  }
  if (!stopped) {
    outcome.failure_reason = "stop latency exceeded";
    return outcome;
  }

  // ... and, when an equipped subject shares the scene, no event against it.
  if (any_equipped) {
    for (const auto& rec : t.events) {
      if (rec.event.state != risk::RiskEventState::Raised) continue;
      const int subject = attribute(rec);
      if (subject >= 0 && scenario.subjects[static_cast<std::size_t>(subject)].equipped) {
        outcome.failure_reason = "false alert";
        return outcome;
      }
    }
  }

  outcome.success = true;
  return outcome;
}

TableResult success_table(const TableRequest& request, const NoiseModel& base_noise,
                          const TrialParams& params) {
  if (request.trials < 1) throw std::invalid_argument("success_table: needs >= 1 trial per cell");

  NoiseModel noise = base_noise;
  if (request.subject_profile == "hard-subject") {
    noise = base_noise.with_hard_subject();
  } else if (request.subject_profile != "default") {
    throw std::invalid_argument("success_table: unknown subject profile " +
                                request.subject_profile);
  }

  TableResult result;
  for (int experiment : request.experiments) {
    const Scenario scenario = scenario_for(experiment, request.duration_s, request.frame_rate);
    SuccessRow row{experiment, request.trials,
                   experiment == 5 ? request.subject_profile + " and " + request.subject_profile
                                   : request.subject_profile,
                   0};
    for (int trial = 0; trial < request.trials; ++trial) {
      TrialOutcome outcome =
          run_trial(scenario, noise, params, trial_seed(request.seed, experiment, trial));
      if (outcome.success) ++row.successes;
      result.outcomes.push_back(std::move(outcome));
    }
    result.table.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace sitewatch::sim
