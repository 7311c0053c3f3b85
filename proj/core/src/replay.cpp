#include "sitewatch/replay.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "sitewatch/errors.hpp"

namespace sitewatch::io {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
  throw ParseError(origin + ":" + std::to_string(line) + ": " + message);
}

}  // namespace

std::vector<FramePacket> parse_replay_text(const std::string& text, const std::string& origin) {
  std::vector<FramePacket> frames;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  std::optional<std::int64_t> last_id;

  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty()) continue;

    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) fail(origin, line_no, "not a JSON object");

    // The first record settles the schema before anything is processed.
    if (!obj.contains("schema_version") || !obj["schema_version"].is_number_integer() ||
        obj["schema_version"].get<int>() != kReplaySchemaVersion) {
      fail(origin, line_no,
           "schema_version mismatch (expected " + std::to_string(kReplaySchemaVersion) + ")");
    }

    FramePacket frame;
    try {
      frame.frame_id = obj.at("frame_id").get<std::int64_t>();
      frame.timestamp = obj.at("timestamp").get<double>();
      for (const json& d : obj.at("detections")) {
        frame.detections.emplace_back(category_from_index(d.at("category").get<int>()),
                                      BBox(d.at("cx").get<double>(), d.at("cy").get<double>(),
                                           d.at("w").get<double>(), d.at("h").get<double>()),
                                      d.at("confidence").get<double>());
      }
    } catch (const std::exception& e) {
      fail(origin, line_no, e.what());
    }

    if (last_id && frame.frame_id <= *last_id) {
      fail(origin, line_no, "frame ids must be strictly increasing");
    }
    last_id = frame.frame_id;
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::vector<FramePacket> read_replay(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_replay_text(buffer.str(), path.string());
}

std::string format_replay(const std::vector<FramePacket>& frames) {
  std::string out;
  for (const FramePacket& frame : frames) {
    json obj;
    obj["schema_version"] = kReplaySchemaVersion;
    obj["frame_id"] = frame.frame_id;
    obj["timestamp"] = frame.timestamp;
    json dets = json::array();
    for (const Detection& d : frame.detections) {
      dets.push_back({{"category", index_of(d.category)},
                      {"cx", d.box.cx},
                      {"cy", d.box.cy},
                      {"w", d.box.w},
                      {"h", d.box.h},
                      {"confidence", d.confidence}});
    }
    obj["detections"] = std::move(dets);
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void write_replay(const std::filesystem::path& path, const std::vector<FramePacket>& frames) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << format_replay(frames);
}

}  // namespace sitewatch::io
