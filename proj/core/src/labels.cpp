#include "sitewatch/labels.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sitewatch/errors.hpp"

namespace sitewatch::io {

namespace {

struct RawRecord {
  int category;
  double cx, cy, w, h;
  double confidence;  // only when expect_confidence
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
  throw ParseError(origin + ":" + std::to_string(line) + ": " + message);
}

double parse_number(const std::string& token, const std::string& origin, int line, int field) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size()) {
    fail(origin, line, "field " + std::to_string(field) + ": not a number: '" + token + "'");
  }
  return value;
}

std::vector<RawRecord> parse_lines(const std::string& text, const std::string& origin,
                                   bool expect_confidence) {
  std::vector<RawRecord> out;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  const std::size_t want = expect_confidence ? 6 : 5;

  while (std::getline(stream, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    std::string token;
    while (fields >> token) tokens.push_back(token);
    if (tokens.empty()) continue;
    if (tokens.size() != want) {
      fail(origin, line_no,
           "expected " + std::to_string(want) + " fields, got " + std::to_string(tokens.size()));
    }

    RawRecord rec{};
    const double index = parse_number(tokens[0], origin, line_no, 1);
    rec.category = static_cast<int>(index);
    if (rec.category != index || rec.category < 0 || rec.category >= kCategoryCount) {
      fail(origin, line_no, "category index out of range: '" + tokens[0] + "'");
    }
    rec.cx = parse_number(tokens[1], origin, line_no, 2);
    rec.cy = parse_number(tokens[2], origin, line_no, 3);
    rec.w = parse_number(tokens[3], origin, line_no, 4);
    rec.h = parse_number(tokens[4], origin, line_no, 5);
    if (expect_confidence) {
      rec.confidence = parse_number(tokens[5], origin, line_no, 6);
      if (rec.confidence < 0.0 || rec.confidence > 1.0) {
        fail(origin, line_no, "confidence out of [0,1]: '" + tokens[5] + "'");
      }
    }
    out.push_back(rec);
  }
  return out;
}

BBox box_of(const RawRecord& rec, const std::string& origin, int index) {
  try {
    return BBox(rec.cx, rec.cy, rec.w, rec.h);
  } catch (const std::invalid_argument& e) {
    throw ParseError(origin + ": record " + std::to_string(index + 1) + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << text;
}

void append_fixed(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  out += buf;
}

}  // namespace

std::vector<GroundTruthBox> parse_ground_truth_text(const std::string& text,
                                                    const std::string& origin) {
  std::vector<GroundTruthBox> out;
  const auto raw = parse_lines(text, origin, /*expect_confidence=*/false);
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.emplace_back(category_from_index(raw[i].category), box_of(raw[i], origin, static_cast<int>(i)));
  }
  return out;
}

std::vector<Detection> parse_predictions_text(const std::string& text, const std::string& origin) {
  std::vector<Detection> out;
  const auto raw = parse_lines(text, origin, /*expect_confidence=*/true);
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out.emplace_back(category_from_index(raw[i].category), box_of(raw[i], origin, static_cast<int>(i)),
                     raw[i].confidence);
  }
  return out;
}

std::vector<GroundTruthBox> parse_ground_truth(const std::filesystem::path& path) {
  return parse_ground_truth_text(read_file(path), path.string());
}

std::vector<Detection> parse_predictions(const std::filesystem::path& path) {
  return parse_predictions_text(read_file(path), path.string());
}

std::string format_ground_truth(const std::vector<GroundTruthBox>& records) {
  std::string out;
  for (const auto& r : records) {
    out += std::to_string(index_of(r.category));
    for (double v : {r.box.cx, r.box.cy, r.box.w, r.box.h}) {
      out += ' ';
      append_fixed(out, v);
    }
    out += '\n';
  }
  return out;
}

std::string format_predictions(const std::vector<Detection>& records) {
  std::string out;
  for (const auto& r : records) {
    out += std::to_string(index_of(r.category));
    for (double v : {r.box.cx, r.box.cy, r.box.w, r.box.h, r.confidence}) {
      out += ' ';
      append_fixed(out, v);
    }
    out += '\n';
  }
  return out;
}

void write_ground_truth(const std::filesystem::path& path,
                        const std::vector<GroundTruthBox>& records) {
  write_file(path, format_ground_truth(records));
}

void write_predictions(const std::filesystem::path& path, const std::vector<Detection>& records) {
  write_file(path, format_predictions(records));
}

}  // namespace sitewatch::io
