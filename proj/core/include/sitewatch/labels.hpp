#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sitewatch/types.hpp"

namespace sitewatch::io {

/// Parses YOLO-style label text: one box per nonempty line,
/// "index cx cy w h" for ground truth, a sixth confidence field for
/// predictions. Malformed lines throw ParseError naming the line and field.
std::vector<GroundTruthBox> parse_ground_truth(const std::filesystem::path& path);
std::vector<Detection> parse_predictions(const std::filesystem::path& path);

std::vector<GroundTruthBox> parse_ground_truth_text(const std::string& text,
                                                    const std::string& origin = "<string>");
std::vector<Detection> parse_predictions_text(const std::string& text,
                                              const std::string& origin = "<string>");

/// Fixed 6-decimal formatting, so written files re-parse to the same records.
void write_ground_truth(const std::filesystem::path& path,
                        const std::vector<GroundTruthBox>& records);
void write_predictions(const std::filesystem::path& path, const std::vector<Detection>& records);

std::string format_ground_truth(const std::vector<GroundTruthBox>& records);
std::string format_predictions(const std::vector<Detection>& records);

}  // namespace sitewatch::io
