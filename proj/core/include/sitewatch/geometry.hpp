#pragma once

namespace sitewatch {

/// Axis-aligned bounding box in YOLO center form, all fields fractions of the
/// image dimensions. Construction enforces w > 0, h > 0 and 0 <= cx, cy <= 1;
/// zero-area or out-of-range boxes throw std::invalid_argument.
struct BBox {
  double cx = 0.5;
  double cy = 0.5;
  double w = 1.0;
  double h = 1.0;

  BBox() = default;
  BBox(double cx, double cy, double w, double h);

  /// cx -/+ w/2, cy -/+ h/2, clipped to the unit square. Given the
  /// construction invariants the clipped corners are never degenerate.
  struct Corners {
    double x1, y1, x2, y2;
  };
  Corners corners() const;

  /// Area of the clipped box.
  double area() const;

  static BBox from_corners(double x1, double y1, double x2, double y2);
};

/// Intersection over union of the clipped boxes; 0 when disjoint.
double iou(const BBox& a, const BBox& b);

/// Intersection area over the smaller of the two clipped areas.
/// 1.0 when one box contains the other.
double overlap_over_smaller(const BBox& a, const BBox& b);

}  // namespace sitewatch
