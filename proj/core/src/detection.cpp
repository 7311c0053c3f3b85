#include "sitewatch/types.hpp"

#include <stdexcept>

namespace sitewatch {

Detection::Detection(Category category, BBox box, double confidence)
    : category(category), box(box), confidence(confidence) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw std::invalid_argument("Detection: confidence must lie in [0,1]");
  }
}

}  // namespace sitewatch
