#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sitewatch/behavior.hpp"
#include "sitewatch/errors.hpp"

using namespace sitewatch;
using fsm::BehaviorFsm;
using fsm::FsmConfig;
using fsm::Mode;
using fsm::PatrolPlan;
using fsm::Pose;
using risk::RiskEvent;
using risk::RiskEventState;

namespace {

RiskEvent raised(Category kind, std::int64_t frame, double ts, int subject = 0) {
  return {kind, frame, ts, subject, RiskEventState::Raised};
}

RiskEvent cleared(Category kind, std::int64_t frame, double ts, int subject = 0) {
  return {kind, frame, ts, subject, RiskEventState::Cleared};
}

}  // namespace

TEST_CASE("format_alert templates") {
  CHECK(fsm::format_alert(raised(Category::NoHardhat, 1, 0.1)).text ==
        "Warning: worker without hardhat detected");
  CHECK(fsm::format_alert(raised(Category::NoSafetyVest, 1, 0.1)).text ==
        "Warning: worker without safety vest detected");
  CHECK(fsm::format_alert(raised(Category::NoMask, 1, 0.1)).text ==
        "Warning: worker without mask detected");
  CHECK_THROWS_AS(fsm::format_alert(cleared(Category::NoHardhat, 1, 0.1)), std::invalid_argument);
  CHECK_THROWS_AS(fsm::format_alert(raised(Category::Person, 1, 0.1)), std::invalid_argument);
}

TEST_CASE("step stops and alerts on a raised event") {
  BehaviorFsm fsm(PatrolPlan::standard(), {});

  // Patrolling with an empty inbox cruises along the plan.
  const auto cruise = fsm.step(0.1, {});
  CHECK(fsm.mode() == Mode::Patrolling);
  CHECK((cruise.linear != 0.0 || cruise.angular != 0.0));
  CHECK(cruise.alerts.empty());

  // A raised event stops the robot on the same tick and carries the alert.
  const std::vector inbox{raised(Category::NoHardhat, 5, 0.2)};
  const auto stop = fsm.step(0.2, inbox);
  CHECK(fsm.mode() == Mode::StoppedAlerting);
  CHECK(stop.linear == 0.0);
  CHECK(stop.angular == 0.0);
  REQUIRE(stop.alerts.size() == 1);
  CHECK(stop.alerts[0].text == "Warning: worker without hardhat detected");

  // Ten more ticks with the event still active: zero velocity, no repeats.
  for (int i = 0; i < 10; ++i) {
    const auto held = fsm.step(0.3 + 0.1 * i, {});
    CHECK(held.linear == 0.0);
    CHECK(held.angular == 0.0);
    CHECK(held.alerts.empty());
    CHECK(fsm.mode() == Mode::StoppedAlerting);
  }

  // Clearing resumes: Resuming for one tick, then Patrolling.
  const std::vector clear_inbox{cleared(Category::NoHardhat, 20, 1.4)};
  fsm.step(1.4, clear_inbox);
  CHECK(fsm.mode() == Mode::Resuming);
  fsm.step(1.5, {});
  CHECK(fsm.mode() == Mode::Patrolling);
}

TEST_CASE("two subjects raised on one tick give two alerts in subject order") {
  BehaviorFsm fsm(PatrolPlan::standard(), {});
  const std::vector inbox{raised(Category::NoSafetyVest, 3, 0.1, /*subject=*/1),
                          raised(Category::NoHardhat, 3, 0.1, /*subject=*/0)};
  const auto cmd = fsm.step(0.1, inbox);
  REQUIRE(cmd.alerts.size() == 2);
  CHECK(cmd.alerts[0].event.subject == 0);
  CHECK(cmd.alerts[1].event.subject == 1);
}

TEST_CASE("non-monotonic ticks are rejected") {
  BehaviorFsm fsm(PatrolPlan::standard(), {});
  fsm.step(1.0, {});
  CHECK_THROWS_AS(fsm.step(1.0, {}), StreamError);
  CHECK_THROWS_AS(fsm.step(0.5, {}), StreamError);
}

TEST_CASE("patrol_command controller") {
  const PatrolPlan plan = PatrolPlan::standard();
  const FsmConfig cfg;

  SUBCASE("at the waypoint and aligned: advance and cruise") {
    std::size_t idx = 0;
    const auto& wp = plan.waypoints[0];
    // Heading toward waypoint 1.
    const double heading =
        std::atan2(plan.waypoints[1].y - wp.y, plan.waypoints[1].x - wp.x);
    const auto cmd = patrol_command(plan, cfg, Pose{wp.x, wp.y, heading}, idx);
    CHECK(idx == 1);
    CHECK(cmd.linear == doctest::Approx(plan.cruise_speed));
    CHECK(cmd.angular == doctest::Approx(0.0));
  }

  SUBCASE("180 degrees off: pure rotation") {
    std::size_t idx = 1;  // waypoint to the east of the start pose
    const auto& wp = plan.waypoints[1];
    const Pose pose{wp.x - 0.5, wp.y, std::numbers::pi};  // facing away
    const auto cmd = patrol_command(plan, cfg, pose, idx);
    CHECK(cmd.linear == 0.0);
    CHECK(std::abs(cmd.angular) == doctest::Approx(cfg.w_max));
  }

  SUBCASE("out-of-area pose gets a recovery command toward the center") {
    std::size_t idx = 0;
    const Pose outside{-0.3, 1.5, std::numbers::pi};  // west of the area, facing further west
    const auto cmd = patrol_command(plan, cfg, outside, idx);
    // Facing away from the center: rotate in place.
    CHECK(cmd.linear == 0.0);
    CHECK(cmd.angular != 0.0);

    const Pose facing_in{-0.3, 1.5, 0.0};
    const auto drive = patrol_command(plan, cfg, facing_in, idx);
    CHECK(drive.linear > 0.0);
  }

  SUBCASE("straight-line approach arrives within distance/cruise + 20%") {
    PatrolPlan line = plan;
    line.waypoints = {{1.7, 1.5}};
    std::size_t idx = 0;
    Pose pose{0.5, 1.5, 0.0};
    const double dt = 0.1;  // 10 Hz
    const double distance = 1.2;
    const int budget = static_cast<int>(std::ceil(distance / line.cruise_speed / dt * 1.2));
    int ticks = 0;
    while (std::hypot(line.waypoints[0].x - pose.x, line.waypoints[0].y - pose.y) >
           cfg.capture_radius) {
      const auto cmd = patrol_command(line, cfg, pose, idx);
      pose.x += cmd.linear * std::cos(pose.heading) * dt;
      pose.y += cmd.linear * std::sin(pose.heading) * dt;
      pose.heading += cmd.angular * dt;
      REQUIRE(++ticks <= budget);
    }
    CHECK(ticks <= budget);
  }
}

TEST_CASE("safety liveness and alert uniqueness over random hazard patterns") {
  std::mt19937_64 rng(67);
  std::bernoulli_distribution coin;

  for (int round = 0; round < 1000; ++round) {
    BehaviorFsm fsm(PatrolPlan::standard(), {});
    const int ticks = std::uniform_int_distribution<int>(5, 60)(rng);
    const double p = std::uniform_real_distribution<double>(0.05, 0.6)(rng);

    // A synthetic but contract-valid transition stream: alternating
    // Raised/Cleared per (subject, kind).
    struct Key {
      bool active = false;
    };
    Key keys[2][2];
    const Category kinds[2] = {Category::NoHardhat, Category::NoSafetyVest};

    std::size_t delivered_raised = 0;
    std::size_t alerts = 0;
    for (int t = 0; t < ticks; ++t) {
      std::vector<RiskEvent> inbox;
      for (int s = 0; s < 2; ++s) {
        for (int k = 0; k < 2; ++k) {
          if (std::bernoulli_distribution(p)(rng)) {
            auto& key = keys[s][k];
            if (key.active) {
              inbox.push_back(cleared(kinds[k], t, 0.1 * t, s));
            } else {
              inbox.push_back(raised(kinds[k], t, 0.1 * t, s));
            }
            key.active = !key.active;
          }
        }
      }
      const std::size_t raised_now =
          static_cast<std::size_t>(std::count_if(inbox.begin(), inbox.end(), [](const auto& e) {
            return e.state == RiskEventState::Raised;
          }));
      delivered_raised += raised_now;

      const auto cmd = fsm.step(0.1 * t, inbox);
      alerts += cmd.alerts.size();
      if (raised_now > 0) {
        // Stop latency <= 1 tick: the confirming tick's command is zero.
        CHECK(cmd.linear == 0.0);
        CHECK(cmd.angular == 0.0);
        CHECK(cmd.alerts.size() == raised_now);
      }
      if (fsm.active_event_count() > 0) {
        CHECK(cmd.linear == 0.0);
        CHECK(cmd.angular == 0.0);
      }
    }
    CHECK(alerts == delivered_raised);
  }
}

TEST_CASE("patrolling never leaves the area by more than one tick of travel") {
  std::mt19937_64 rng(71);
  const PatrolPlan plan = PatrolPlan::standard();
  const FsmConfig cfg;
  const double dt = 1.0 / cfg.tick_rate;
  const double slack = cfg.v_max * dt + 1e-9;

  for (int round = 0; round < 40; ++round) {
    const Pose start{std::uniform_real_distribution<double>(0.0, plan.area_width)(rng),
                     std::uniform_real_distribution<double>(0.0, plan.area_height)(rng),
                     std::uniform_real_distribution<double>(-std::numbers::pi,
                                                            std::numbers::pi)(rng)};
    BehaviorFsm fsm(plan, cfg, start);
    for (int t = 1; t <= 400; ++t) {
      fsm.step(dt * t, {});
      const Pose& pose = fsm.pose();
      CHECK(pose.x >= -slack);
      CHECK(pose.x <= plan.area_width + slack);
      CHECK(pose.y >= -slack);
      CHECK(pose.y <= plan.area_height + slack);
    }
  }
}

TEST_CASE("step is a deterministic state function") {
  auto drive = [](BehaviorFsm& fsm) {
    std::vector<std::pair<double, double>> commands;
    std::mt19937_64 rng(73);
    std::bernoulli_distribution coin(0.2);
    bool active = false;
    for (int t = 1; t <= 200; ++t) {
      std::vector<RiskEvent> inbox;
      if (coin(rng)) {
        inbox.push_back(active ? cleared(Category::NoHardhat, t, 0.1 * t)
                               : raised(Category::NoHardhat, t, 0.1 * t));
        active = !active;
      }
      const auto cmd = fsm.step(0.1 * t, inbox);
      commands.emplace_back(cmd.linear, cmd.angular);
    }
    return commands;
  };
  BehaviorFsm a(PatrolPlan::standard(), {});
  BehaviorFsm b(PatrolPlan::standard(), {});
  CHECK(drive(a) == drive(b));
}
