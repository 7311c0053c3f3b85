#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sitewatch/risk.hpp"

namespace sitewatch::fsm {

enum class Mode { Patrolling, StoppedAlerting, Resuming };

std::string_view to_string(Mode m);

struct Pose {
  double x = 0.0;        // meters
  double y = 0.0;        // meters
  double heading = 0.0;  // radians
};

struct Waypoint {
  double x;
  double y;
};

/// Rectangular patrol area with a waypoint loop inside it.
struct PatrolPlan {
  double area_width = 2.0;   // meters
  double area_height = 3.0;  // meters
  double cruise_speed = 0.25;  // m/s
  std::vector<Waypoint> waypoints;

  /// Default plan: waypoint loop on a rectangle inset from the area edges.
  static PatrolPlan standard(double area_width = 2.0, double area_height = 3.0,
                             double cruise_speed = 0.25);

  bool inside_area(double x, double y) const;
  Waypoint area_center() const { return {area_width / 2.0, area_height / 2.0}; }
  void validate() const;  // waypoints must lie inside the area
};

struct FsmConfig {
  double v_max = 0.3;          // m/s
  double w_max = 1.0;          // rad/s
  double tick_rate = 10.0;     // Hz, informative default
  double capture_radius = 0.1; // m
  double heading_gain = 2.0;

  void validate() const;
};

struct AlertMessage {
  std::string text;
  risk::RiskEvent event;
};

struct VelocityCommand {
  double linear = 0.0;
  double angular = 0.0;
};

/// Output of one FSM tick. Alerts appear only on ticks that delivered Raised
/// transitions, one per transition, ordered by subject ordinal.
struct ActuationCommand {
  double linear = 0.0;
  double angular = 0.0;
  std::vector<AlertMessage> alerts;
};

/// Deterministic alert template per violation kind. Throws
/// std::invalid_argument for Cleared events or non-violation kinds.
AlertMessage format_alert(const risk::RiskEvent& event);

/// Heading controller toward the current waypoint. Advances waypoint_index
/// (looping) inside the capture radius; out-of-area poses get a recovery
/// command toward the area center (turn in place until roughly aligned).
VelocityCommand patrol_command(const PatrolPlan& plan, const FsmConfig& cfg, const Pose& pose,
                               std::size_t& waypoint_index);

/// The robot's operating logic: patrol until a Raised event arrives, hold
/// zero velocity while any event is active, alert exactly once per Raised
/// transition, resume the plan when everything clears. Also integrates its
/// own commands (unicycle kinematics) so the pose evolves tick by tick.
class BehaviorFsm {
 public:
  BehaviorFsm(PatrolPlan plan, FsmConfig cfg);
  BehaviorFsm(PatrolPlan plan, FsmConfig cfg, Pose start);

  /// Advances one tick. Ticks must be strictly increasing (StreamError).
  ActuationCommand step(double tick_time, std::span<const risk::RiskEvent> inbox);

  Mode mode() const { return mode_; }
  const Pose& pose() const { return pose_; }
  std::size_t active_event_count() const { return active_.size(); }

 private:
  PatrolPlan plan_;
  FsmConfig cfg_;
  Pose pose_;
  Mode mode_ = Mode::Patrolling;
  std::size_t waypoint_ = 0;
  std::optional<double> last_tick_;
  VelocityCommand last_command_;
  std::set<std::pair<int, int>> active_;  // (subject, violation category index)
};

}  // namespace sitewatch::fsm
