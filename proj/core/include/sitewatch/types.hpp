#pragma once

#include <cstdint>
#include <vector>

#include "sitewatch/geometry.hpp"
#include "sitewatch/taxonomy.hpp"

namespace sitewatch {

/// One detector output box. Confidence outside [0,1] throws at construction.
struct Detection {
  Category category = Category::Person;
  BBox box;
  double confidence = 1.0;

  Detection() = default;
  Detection(Category category, BBox box, double confidence);
};

struct GroundTruthBox {
  Category category = Category::Person;
  BBox box;

  GroundTruthBox() = default;
  GroundTruthBox(Category category, BBox box) : category(category), box(box) {}
};

/// Timestamped set of detections flowing through the bus. Streams must carry
/// strictly increasing frame ids and non-decreasing timestamps; the consumers
/// (risk engine, pipeline) enforce this.
struct FramePacket {
  std::int64_t frame_id = 0;
  double timestamp = 0.0;  // seconds, monotonic clock
  std::vector<Detection> detections;
};

}  // namespace sitewatch
