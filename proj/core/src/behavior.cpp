#include "sitewatch/behavior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sitewatch/errors.hpp"

namespace sitewatch::fsm {

namespace {

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a < -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

// Alignment cone for driving while in out-of-area recovery: tight enough that
// motion always has an inward component toward the area center.
constexpr double kRecoveryAlignment = 5.0 * std::numbers::pi / 180.0;

}  // namespace

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::Patrolling: return "Patrolling";
    case Mode::StoppedAlerting: return "StoppedAlerting";
    case Mode::Resuming: return "Resuming";
  }
  return "?";
}

PatrolPlan PatrolPlan::standard(double area_width, double area_height, double cruise_speed) {
  PatrolPlan plan;
  plan.area_width = area_width;
  plan.area_height = area_height;
  plan.cruise_speed = cruise_speed;
  const double inset_x = area_width * 0.2;
  const double inset_y = area_height * 0.15;
  plan.waypoints = {{inset_x, inset_y},
                    {area_width - inset_x, inset_y},
                    {area_width - inset_x, area_height - inset_y},
                    {inset_x, area_height - inset_y}};
  plan.validate();
  return plan;
}

bool PatrolPlan::inside_area(double x, double y) const {
  return x >= 0.0 && x <= area_width && y >= 0.0 && y <= area_height;
}

void PatrolPlan::validate() const {
  if (!(area_width > 0.0) || !(area_height > 0.0)) {
    throw std::invalid_argument("PatrolPlan: area dimensions must be positive");
  }
  if (!(cruise_speed > 0.0)) {
    throw std::invalid_argument("PatrolPlan: cruise speed must be positive");
  }
  if (waypoints.empty()) throw std::invalid_argument("PatrolPlan: needs at least one waypoint");
  for (const auto& wp : waypoints) {
    if (!inside_area(wp.x, wp.y)) {
      throw std::invalid_argument("PatrolPlan: waypoint outside the patrol area");
    }
  }
}

void FsmConfig::validate() const {
  if (!(v_max > 0.0) || !(w_max > 0.0)) {
    throw std::invalid_argument("FsmConfig: velocity limits must be positive");
  }
  if (!(tick_rate > 0.0)) throw std::invalid_argument("FsmConfig: tick_rate must be positive");
  if (!(capture_radius > 0.0)) {
    throw std::invalid_argument("FsmConfig: capture_radius must be positive");
  }
}

AlertMessage format_alert(const risk::RiskEvent& event) {
  if (event.state != risk::RiskEventState::Raised) {
    throw std::invalid_argument("format_alert: alerts only accompany Raised events");
  }
  std::string text;
  switch (event.kind) {
    case Category::NoHardhat: text = "Warning: worker without hardhat detected"; break;
    case Category::NoSafetyVest: text = "Warning: worker without safety vest detected"; break;
    case Category::NoMask: text = "Warning: worker without mask detected"; break;
    default:
      throw std::invalid_argument("format_alert: not a violation category");
  }
  return {std::move(text), event};
}

VelocityCommand patrol_command(const PatrolPlan& plan, const FsmConfig& cfg, const Pose& pose,
                               std::size_t& waypoint_index) {
  const bool recovering = !plan.inside_area(pose.x, pose.y);
  Waypoint target;
  if (recovering) {
    target = plan.area_center();
  } else {
    target = plan.waypoints[waypoint_index % plan.waypoints.size()];
    if (std::hypot(target.x - pose.x, target.y - pose.y) <= cfg.capture_radius) {
      waypoint_index = (waypoint_index + 1) % plan.waypoints.size();
      target = plan.waypoints[waypoint_index];
    }
  }

  const double desired = std::atan2(target.y - pose.y, target.x - pose.x);
  const double err = wrap_angle(desired - pose.heading);

  VelocityCommand cmd;
  cmd.angular = std::clamp(cfg.heading_gain * err, -cfg.w_max, cfg.w_max);
  if (recovering) {
    cmd.linear = std::abs(err) <= kRecoveryAlignment
                     ? std::clamp(plan.cruise_speed, 0.0, cfg.v_max)
                     : 0.0;
  } else {
    cmd.linear = std::clamp(plan.cruise_speed * std::max(0.0, std::cos(err)), 0.0, cfg.v_max);
  }
  return cmd;
}

BehaviorFsm::BehaviorFsm(PatrolPlan plan, FsmConfig cfg)
    : plan_(std::move(plan)), cfg_(cfg) {
  plan_.validate();
  cfg_.validate();
  pose_ = Pose{plan_.area_width / 2.0, plan_.area_height / 2.0, 0.0};
}

BehaviorFsm::BehaviorFsm(PatrolPlan plan, FsmConfig cfg, Pose start)
    : plan_(std::move(plan)), cfg_(cfg), pose_(start) {
  plan_.validate();
  cfg_.validate();
}

ActuationCommand BehaviorFsm::step(double tick_time, std::span<const risk::RiskEvent> inbox) {
  if (last_tick_ && tick_time <= *last_tick_) {
    throw StreamError("fsm: non-monotonic tick");
  }

  // The previous command has been in effect since the last tick.
  if (last_tick_) {
    const double dt = tick_time - *last_tick_;
    pose_.x += last_command_.linear * std::cos(pose_.heading) * dt;
    pose_.y += last_command_.linear * std::sin(pose_.heading) * dt;
    pose_.heading = wrap_angle(pose_.heading + last_command_.angular * dt);
  }
  last_tick_ = tick_time;

  std::vector<risk::RiskEvent> raised(inbox.begin(), inbox.end());
  std::stable_sort(raised.begin(), raised.end(), [](const auto& a, const auto& b) {
    return std::pair(a.subject, index_of(a.kind)) < std::pair(b.subject, index_of(b.kind));
  });

  ActuationCommand cmd;
  for (const auto& event : raised) {
    const std::pair<int, int> key{event.subject, index_of(event.kind)};
    if (event.state == risk::RiskEventState::Raised) {
      if (active_.insert(key).second) cmd.alerts.push_back(format_alert(event));
    } else {
      active_.erase(key);
    }
  }

  if (!active_.empty()) {
    mode_ = Mode::StoppedAlerting;
    cmd.linear = 0.0;
    cmd.angular = 0.0;
  } else {
    mode_ = mode_ == Mode::StoppedAlerting ? Mode::Resuming : Mode::Patrolling;
    const VelocityCommand v = patrol_command(plan_, cfg_, pose_, waypoint_);
    cmd.linear = v.linear;
    cmd.angular = v.angular;
  }

  last_command_ = {cmd.linear, cmd.angular};
  return cmd;
}

}  // namespace sitewatch::fsm
