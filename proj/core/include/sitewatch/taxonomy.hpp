#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace sitewatch {

/// The ten detector classes of the construction-safety taxonomy, in
/// canonical listing order. Indices are part of the label file format.
enum class Category : int {
  Hardhat = 0,
  Mask = 1,
  NoHardhat = 2,
  NoMask = 3,
  NoSafetyVest = 4,
  Person = 5,
  SafetyCone = 6,
  SafetyVest = 7,
  Machinery = 8,
  Vehicle = 9,
};

inline constexpr int kCategoryCount = 10;

inline constexpr std::array<Category, kCategoryCount> all_categories() {
  return {Category::Hardhat,      Category::Mask,       Category::NoHardhat,
          Category::NoMask,       Category::NoSafetyVest, Category::Person,
          Category::SafetyCone,   Category::SafetyVest, Category::Machinery,
          Category::Vehicle};
}

std::string_view to_string(Category c);

/// Canonical name -> category. Returns nullopt for unknown names.
std::optional<Category> category_from_name(std::string_view name);

/// Index -> category. Throws std::out_of_range for indices outside 0..9.
Category category_from_index(int index);

constexpr int index_of(Category c) { return static_cast<int>(c); }

/// True for NO-Hardhat, NO-Mask and NO-Safety Vest.
bool is_violation(Category c);

/// Paired positive/violation label, e.g. Hardhat <-> NO-Hardhat.
/// Unpaired categories (Person, Safety Cone, Machinery, Vehicle) map to nullopt.
std::optional<Category> violation_complement(Category c);

}  // namespace sitewatch
