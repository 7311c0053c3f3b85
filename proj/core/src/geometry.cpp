#include "sitewatch/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sitewatch {

namespace {

double intersection_area(const BBox::Corners& a, const BBox::Corners& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

}  // namespace

BBox::BBox(double cx, double cy, double w, double h) : cx(cx), cy(cy), w(w), h(h) {
  if (!(w > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument("BBox: width and height must be positive");
  }
  if (!(cx >= 0.0 && cx <= 1.0) || !(cy >= 0.0 && cy <= 1.0)) {
    throw std::invalid_argument("BBox: center must lie in the unit square");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(w) || !std::isfinite(h)) {
    throw std::invalid_argument("BBox: fields must be finite");
  }
}

BBox::Corners BBox::corners() const {
  return {std::clamp(cx - w / 2.0, 0.0, 1.0), std::clamp(cy - h / 2.0, 0.0, 1.0),
          std::clamp(cx + w / 2.0, 0.0, 1.0), std::clamp(cy + h / 2.0, 0.0, 1.0)};
}

double BBox::area() const {
  const Corners c = corners();
  return (c.x2 - c.x1) * (c.y2 - c.y1);
}

BBox BBox::from_corners(double x1, double y1, double x2, double y2) {
  if (!(x1 < x2) || !(y1 < y2)) {
    throw std::invalid_argument("BBox::from_corners: corners must be ordered");
  }
  return BBox((x1 + x2) / 2.0, (y1 + y2) / 2.0, x2 - x1, y2 - y1);
}

double iou(const BBox& a, const BBox& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const double inter = intersection_area(ca, cb);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

double overlap_over_smaller(const BBox& a, const BBox& b) {
  const double inter = intersection_area(a.corners(), b.corners());
  if (inter <= 0.0) return 0.0;
  return inter / std::min(a.area(), b.area());
}

}  // namespace sitewatch
