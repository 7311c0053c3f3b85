#include "sitewatch/taxonomy.hpp"

#include <stdexcept>
#include <string>

namespace sitewatch {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kNames = {
    "Hardhat",     "Mask",           "NO-Hardhat", "NO-Mask", "NO-Safety Vest",
    "Person",      "Safety Cone",    "Safety Vest", "Machinery", "Vehicle",
};

}  // namespace

std::string_view to_string(Category c) { return kNames[static_cast<std::size_t>(c)]; }

std::optional<Category> category_from_name(std::string_view name) {
  for (int i = 0; i < kCategoryCount; ++i) {
    if (kNames[static_cast<std::size_t>(i)] == name) return static_cast<Category>(i);
  }
  return std::nullopt;
}

Category category_from_index(int index) {
  if (index < 0 || index >= kCategoryCount) {
    throw std::out_of_range("category index out of range: " + std::to_string(index));
  }
  return static_cast<Category>(index);
}

bool is_violation(Category c) {
  return c == Category::NoHardhat || c == Category::NoMask || c == Category::NoSafetyVest;
}

std::optional<Category> violation_complement(Category c) {
  switch (c) {
    case Category::Hardhat: return Category::NoHardhat;
    case Category::NoHardhat: return Category::Hardhat;
    case Category::Mask: return Category::NoMask;
    case Category::NoMask: return Category::Mask;
    case Category::SafetyVest: return Category::NoSafetyVest;
    case Category::NoSafetyVest: return Category::SafetyVest;
    default: return std::nullopt;
  }
}

}  // namespace sitewatch
