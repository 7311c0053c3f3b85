#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "sitewatch/errors.hpp"
#include "sitewatch/risk.hpp"

using namespace sitewatch;
using risk::EquipmentKind;
using risk::EquipmentStatus;
using risk::Hazard;
using risk::RiskConfig;
using risk::RiskEventState;

namespace {

FramePacket frame_of(std::int64_t id, std::vector<Detection> dets) {
  return {id, static_cast<double>(id) * 0.2, std::move(dets)};
}

Detection det(Category c, double cx, double cy, double w, double h, double conf = 0.9) {
  return Detection(c, BBox(cx, cy, w, h), conf);
}

const Detection kPerson = det(Category::Person, 0.5, 0.5, 0.2, 0.4);

}  // namespace

TEST_CASE("associate attaches equipment to the right person") {
  RiskConfig cfg;

  SUBCASE("hardhat inside the person box reads Present") {
    const auto out =
        risk::associate(frame_of(0, {kPerson, det(Category::Hardhat, 0.5, 0.35, 0.08, 0.06)}), cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].equipment[static_cast<int>(EquipmentKind::Hardhat)] == EquipmentStatus::Present);
    CHECK(out[0].equipment[static_cast<int>(EquipmentKind::SafetyVest)] ==
          EquipmentStatus::Unknown);
    CHECK(out[0].supporting.size() == 2);
  }

  SUBCASE("NO-Safety Vest inside the person box reads Violation") {
    const auto out = risk::associate(
        frame_of(0, {kPerson, det(Category::NoSafetyVest, 0.5, 0.55, 0.12, 0.1)}), cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].equipment[static_cast<int>(EquipmentKind::SafetyVest)] ==
          EquipmentStatus::Violation);
  }

  SUBCASE("equipment goes to the person with the larger overlap") {
    const auto left = det(Category::Person, 0.3, 0.5, 0.2, 0.4);
    const auto right = det(Category::Person, 0.75, 0.5, 0.2, 0.4);
    const auto hat = det(Category::Hardhat, 0.3, 0.35, 0.08, 0.06);
    const auto out = risk::associate(frame_of(0, {left, right, hat}), cfg);
    REQUIRE(out.size() == 2);
    CHECK(out[0].equipment[static_cast<int>(EquipmentKind::Hardhat)] == EquipmentStatus::Present);
    CHECK(out[1].equipment[static_cast<int>(EquipmentKind::Hardhat)] == EquipmentStatus::Unknown);
  }

  SUBCASE("unattached equipment is discarded") {
    const auto out =
        risk::associate(frame_of(0, {kPerson, det(Category::Hardhat, 0.05, 0.05, 0.05, 0.05)}), cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].equipment[static_cast<int>(EquipmentKind::Hardhat)] == EquipmentStatus::Unknown);
    CHECK(out[0].supporting.size() == 1);  // just the person detection
  }

  SUBCASE("detections below the confidence floor are invisible") {
    const auto out = risk::associate(
        frame_of(0, {kPerson, det(Category::NoHardhat, 0.5, 0.35, 0.08, 0.06, 0.4)}), cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].equipment[static_cast<int>(EquipmentKind::Hardhat)] == EquipmentStatus::Unknown);
  }

  SUBCASE("conflicting evidence resolves to the higher confidence") {
    const auto out = risk::associate(
        frame_of(0, {kPerson, det(Category::Hardhat, 0.5, 0.35, 0.08, 0.06, 0.6),
                     det(Category::NoHardhat, 0.5, 0.35, 0.08, 0.06, 0.8)}),
        cfg);
    CHECK(out[0].equipment[static_cast<int>(EquipmentKind::Hardhat)] ==
          EquipmentStatus::Violation);
  }
}

TEST_CASE("evaluate turns Violation statuses into hazards") {
  RiskConfig cfg;

  SUBCASE("compliant subject yields nothing") {
    const auto a = risk::associate(
        frame_of(0, {kPerson, det(Category::Hardhat, 0.5, 0.35, 0.08, 0.06),
                     det(Category::SafetyVest, 0.5, 0.55, 0.12, 0.1)}),
        cfg);
    CHECK(risk::evaluate(a, cfg).empty());
  }

  SUBCASE("one violation yields one hazard") {
    const auto a =
        risk::associate(frame_of(0, {kPerson, det(Category::NoHardhat, 0.5, 0.35, 0.08, 0.06)}), cfg);
    const auto hazards = risk::evaluate(a, cfg);
    REQUIRE(hazards.size() == 1);
    CHECK(hazards[0] == Hazard{0, Category::NoHardhat});
  }

  SUBCASE("mixed pair: hazards only for the unequipped subject") {
    const auto equipped = det(Category::Person, 0.3, 0.5, 0.2, 0.4);
    const auto unequipped = det(Category::Person, 0.75, 0.5, 0.2, 0.4);
    const auto a = risk::associate(
        frame_of(0, {equipped, unequipped, det(Category::Hardhat, 0.3, 0.35, 0.08, 0.06),
                     det(Category::SafetyVest, 0.3, 0.55, 0.12, 0.1),
                     det(Category::NoHardhat, 0.75, 0.35, 0.08, 0.06),
                     det(Category::NoSafetyVest, 0.75, 0.55, 0.12, 0.1)}),
        cfg);
    const auto hazards = risk::evaluate(a, cfg);
    REQUIRE(hazards.size() == 2);
    CHECK(hazards[0] == Hazard{1, Category::NoHardhat});
    CHECK(hazards[1] == Hazard{1, Category::NoSafetyVest});
  }

  SUBCASE("Unknown is never a hazard") {
    const auto a = risk::associate(frame_of(0, {kPerson}), cfg);
    CHECK(risk::evaluate(a, cfg).empty());
  }

  SUBCASE("mask violations only when enabled") {
    const auto frame = frame_of(0, {kPerson, det(Category::NoMask, 0.5, 0.4, 0.06, 0.05)});
    CHECK(risk::evaluate(risk::associate(frame, cfg), cfg).empty());
    RiskConfig masked = cfg;
    masked.monitor_mask = true;
    const auto hazards = risk::evaluate(risk::associate(frame, masked), masked);
    REQUIRE(hazards.size() == 1);
    CHECK(hazards[0].kind == Category::NoMask);
  }
}

TEST_CASE("lowering the confidence floor never removes hazard kinds") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> conf(0.05, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 0.8);
  std::uniform_int_distribution<int> nboxes(1, 12);
  const Category equipment_cats[] = {Category::Hardhat, Category::NoHardhat, Category::SafetyVest,
                                     Category::NoSafetyVest, Category::Person};

  for (int round = 0; round < 200; ++round) {
    FramePacket frame{0, 0.0, {}};
    const int n = nboxes(rng);
    for (int i = 0; i < n; ++i) {
      const Category c = equipment_cats[std::uniform_int_distribution<int>(0, 4)(rng)];
      const double w = c == Category::Person ? 0.2 : 0.08;
      const double h = c == Category::Person ? 0.4 : 0.08;
      frame.detections.push_back(det(c, pos(rng), pos(rng), w, h, conf(rng)));
    }
    RiskConfig high;
    high.confidence_floor = 0.7;
    RiskConfig low;
    low.confidence_floor = 0.3;

    auto kinds = [&](const RiskConfig& cfg) {
      std::multiset<Category> out;
      for (const auto& h : risk::evaluate(risk::associate(frame, cfg), cfg)) out.insert(h.kind);
      return out;
    };
    const auto strict = kinds(high);
    const auto loose = kinds(low);
    // Every hazard kind visible at the high floor survives at the low floor.
    CHECK(std::includes(loose.begin(), loose.end(), strict.begin(), strict.end()));
  }
}

TEST_CASE("debounce raises after N and clears after M") {
  risk::DebounceTracker tracker(3, 2);
  const Hazard hazard{0, Category::NoHardhat};

  SUBCASE("hazard in frames 1..3 raises at frame 3, clears at frame 7") {
    std::vector<risk::RiskEvent> all;
    for (std::int64_t f = 1; f <= 7; ++f) {
      const bool active = f <= 5;
      const auto events =
          tracker.update(active ? std::vector{hazard} : std::vector<Hazard>{}, f, 0.2 * f);
      for (const auto& e : events) all.push_back(e);
    }
    REQUIRE(all.size() == 2);
    CHECK(all[0].state == RiskEventState::Raised);
    CHECK(all[0].frame_id == 3);
    CHECK(all[0].kind == Category::NoHardhat);
    CHECK(all[1].state == RiskEventState::Cleared);
    CHECK(all[1].frame_id == 7);
  }

  SUBCASE("a broken streak never raises") {
    CHECK(tracker.update(std::vector{hazard}, 1, 0.2).empty());
    CHECK(tracker.update(std::vector{hazard}, 2, 0.4).empty());
    CHECK(tracker.update({}, 3, 0.6).empty());
    CHECK(tracker.update(std::vector{hazard}, 4, 0.8).empty());
    CHECK(tracker.update(std::vector{hazard}, 5, 1.0).empty());
    const auto events = tracker.update(std::vector{hazard}, 6, 1.2);
    REQUIRE(events.size() == 1);
    CHECK(events[0].frame_id == 6);
  }

  SUBCASE("out-of-order frames are a stream error") {
    tracker.update({}, 5, 1.0);
    CHECK_THROWS_AS(tracker.update({}, 5, 1.0), StreamError);
    CHECK_THROWS_AS(tracker.update({}, 4, 0.8), StreamError);
  }
}

TEST_CASE("debounce matches the window-scan reference exhaustively") {
  // All hazard bit-strings of length <= 12, all N, M <= 4.
  for (int n = 1; n <= 4; ++n) {
    for (int m = 1; m <= 4; ++m) {
      for (int len = 1; len <= 12; ++len) {
        for (std::uint32_t word = 0; word < (1u << len); ++word) {
          std::vector<bool> bits(static_cast<std::size_t>(len));
          for (int i = 0; i < len; ++i) bits[static_cast<std::size_t>(i)] = (word >> i) & 1u;

          risk::DebounceTracker tracker(n, m);
          const Hazard hazard{0, Category::NoSafetyVest};
          std::vector<oracle::ReferenceTransition> got;
          for (int i = 0; i < len; ++i) {
            const auto events = tracker.update(
                bits[static_cast<std::size_t>(i)] ? std::vector{hazard} : std::vector<Hazard>{}, i,
                0.1 * i);
            for (const auto& e : events) {
              got.push_back({e.frame_id, e.state == RiskEventState::Raised});
            }
          }
          const auto expected = oracle::reference_debounce(bits, n, m);
          REQUIRE(got == expected);
        }
      }
    }
  }
}

TEST_CASE("debounce properties on random patterns") {
  std::mt19937_64 rng(59);
  std::bernoulli_distribution coin(0.5);

  for (int round = 0; round < 300; ++round) {
    const int n = std::uniform_int_distribution<int>(1, 5)(rng);
    const int m = std::uniform_int_distribution<int>(1, 5)(rng);
    std::vector<bool> bits(60);
    for (auto&& b : bits) b = coin(rng);

    risk::DebounceTracker tracker(n, m);
    const Hazard hazard{3, Category::NoHardhat};
    std::vector<risk::RiskEvent> events;
    int longest_run = 0;
    int run = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      run = bits[i] ? run + 1 : 0;
      longest_run = std::max(longest_run, run);
      for (const auto& e : tracker.update(
               bits[i] ? std::vector{hazard} : std::vector<Hazard>{},
               static_cast<std::int64_t>(i), 0.1 * static_cast<double>(i))) {
        events.push_back(e);
      }
    }

    // Flicker suppression: no N-run, no events at all.
    if (longest_run < n) CHECK(events.empty());

    // Alternation with strictly increasing frames.
    for (std::size_t i = 0; i < events.size(); ++i) {
      CHECK(events[i].state ==
            (i % 2 == 0 ? RiskEventState::Raised : RiskEventState::Cleared));
      if (i > 0) CHECK(events[i].frame_id > events[i - 1].frame_id);
    }
  }
}

TEST_CASE("engine tracks subjects across frames") {
  RiskConfig cfg;
  risk::RiskEngine engine(cfg);

  SUBCASE("a drifting person keeps its id, debounce confirms") {
    std::vector<risk::RiskEvent> events;
    for (int f = 0; f < 5; ++f) {
      const double cx = 0.4 + 0.02 * f;  // drift below the 0.2 gate
      const auto frame = frame_of(
          f, {det(Category::Person, cx, 0.5, 0.2, 0.4),
              det(Category::NoHardhat, cx, 0.35, 0.08, 0.06)});
      for (const auto& e : engine.process(frame)) events.push_back(e);
    }
    REQUIRE(events.size() == 1);
    CHECK(events[0].state == RiskEventState::Raised);
    CHECK(events[0].subject == 0);
    CHECK(events[0].frame_id == 2);  // third consecutive frame
  }

  SUBCASE("teleporting person becomes a new subject and restarts the streak") {
    for (int f = 0; f < 2; ++f) {
      const auto frame = frame_of(f, {det(Category::Person, 0.2, 0.2, 0.15, 0.3),
                                      det(Category::NoHardhat, 0.2, 0.09, 0.06, 0.05)});
      CHECK(engine.process(frame).empty());
    }
    // Jump across the image: new subject, streak starts over.
    std::vector<risk::RiskEvent> events;
    for (int f = 2; f < 5; ++f) {
      const auto frame = frame_of(f, {det(Category::Person, 0.8, 0.8, 0.15, 0.3),
                                      det(Category::NoHardhat, 0.8, 0.69, 0.06, 0.05)});
      for (const auto& e : engine.process(frame)) events.push_back(e);
    }
    REQUIRE(events.size() == 1);
    CHECK(events[0].subject == 1);
    CHECK(events[0].frame_id == 4);
  }

  SUBCASE("identical streams give identical event sequences") {
    auto run_stream = [&]() {
      risk::RiskEngine fresh{cfg};
      std::vector<risk::RiskEvent> events;
      std::mt19937_64 rng(61);
      std::bernoulli_distribution coin(0.5);
      for (int f = 0; f < 40; ++f) {
        std::vector<Detection> dets{det(Category::Person, 0.5, 0.5, 0.2, 0.4)};
        if (coin(rng)) dets.push_back(det(Category::NoSafetyVest, 0.5, 0.55, 0.12, 0.1));
        for (const auto& e : fresh.process(frame_of(f, dets))) events.push_back(e);
      }
      return events;
    };
    const auto a = run_stream();
    const auto b = run_stream();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].frame_id == b[i].frame_id);
      CHECK(a[i].subject == b[i].subject);
      CHECK(a[i].kind == b[i].kind);
      CHECK((a[i].state == b[i].state));
    }
  }

  SUBCASE("out-of-order frames are rejected") {
    engine.process(frame_of(3, {kPerson}));
    CHECK_THROWS_AS(engine.process(frame_of(3, {kPerson})), StreamError);
  }
}
