#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sitewatch/types.hpp"

namespace sitewatch::io {

inline constexpr int kReplaySchemaVersion = 1;

/// Reads a JSON-lines detection replay: one object per frame carrying
/// schema_version, frame_id, timestamp and the detection list. The schema
/// version is checked on the first line, before any frame is processed.
/// Frame ids must be strictly increasing. Throws ParseError.
std::vector<FramePacket> read_replay(const std::filesystem::path& path);
std::vector<FramePacket> parse_replay_text(const std::string& text,
                                           const std::string& origin = "<string>");

void write_replay(const std::filesystem::path& path, const std::vector<FramePacket>& frames);
std::string format_replay(const std::vector<FramePacket>& frames);

}  // namespace sitewatch::io
