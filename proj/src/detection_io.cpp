#include "oodgate/detection_io.hpp"

#include <json.hpp>

#include "oodgate/errors.hpp"
#include "oodgate/formats.hpp"

namespace oodgate::det {
namespace {

using nlohmann::json;

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what(), line_no);
      }
      if (!obj.is_object()) throw FormatError("line is not a JSON object", line_no);
      fn(obj, line_no);
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
}

struct Common {
  std::string image_id;
  int class_id = 0;
  BoundingBox box;
};

Common parse_common(const json& obj, std::size_t line_no) {
  Common c;
  const auto id = obj.find("image_id");
  if (id == obj.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw FormatError("missing or empty string field 'image_id'", line_no);
  }
  c.image_id = id->get<std::string>();

  const auto cls = obj.find("class_id");
  if (cls == obj.end() || !cls->is_number_integer() || cls->get<long long>() < 0) {
    throw FormatError("'class_id' must be a non-negative integer", line_no);
  }
  c.class_id = cls->get<int>();

  const auto bbox = obj.find("bbox");
  if (bbox == obj.end() || !bbox->is_array() || bbox->size() != 4) {
    throw FormatError("'bbox' must be an array of 4 numbers", line_no);
  }
  double v[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(*bbox)[i].is_number()) {
      throw FormatError("'bbox' must be an array of 4 numbers", line_no);
    }
    v[i] = (*bbox)[i].get<double>();
  }
  c.box = {v[0], v[1], v[2], v[3]};
  try {
    validate(c.box);
  } catch (const InvalidBoxError& e) {
    throw InvalidBoxError(std::string(e.what()) + " on line " +
                          std::to_string(line_no));
  }
  return c;
}

json box_json(const BoundingBox& b) { return json::array({b.x1, b.y1, b.x2, b.y2}); }

}  // namespace

std::vector<Detection> parse_detections(std::string_view text) {
  std::vector<Detection> out;
  for_each_line(text, [&](const json& obj, std::size_t line_no) {
    Common c = parse_common(obj, line_no);
    const auto conf = obj.find("confidence");
    if (conf == obj.end() || !conf->is_number()) {
      throw FormatError("missing numeric field 'confidence'", line_no);
    }
    const double v = conf->get<double>();
    if (!(v >= 0.0 && v <= 1.0)) {
      throw FormatError("'confidence' outside [0, 1]", line_no);
    }
    out.push_back({std::move(c.image_id), c.class_id, c.box, v});
  });
  return out;
}

std::vector<GroundTruthBox> parse_ground_truth(std::string_view text) {
  std::vector<GroundTruthBox> out;
  for_each_line(text, [&](const json& obj, std::size_t line_no) {
    Common c = parse_common(obj, line_no);
    out.push_back({std::move(c.image_id), c.class_id, c.box});
  });
  return out;
}

std::string to_jsonl(const std::vector<Detection>& dets) {
  std::string out;
  for (const auto& d : dets) {
    json obj = {{"image_id", d.image_id},
                {"class_id", d.class_id},
                {"bbox", box_json(d.box)},
                {"confidence", d.confidence}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::string to_jsonl(const std::vector<GroundTruthBox>& gts) {
  std::string out;
  for (const auto& g : gts) {
    json obj = {{"image_id", g.image_id},
                {"class_id", g.class_id},
                {"bbox", box_json(g.box)}};
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::vector<Detection> read_detections(const std::filesystem::path& path) {
  return parse_detections(formats::read_file(path));
}

std::vector<GroundTruthBox> read_ground_truth(const std::filesystem::path& path) {
  return parse_ground_truth(formats::read_file(path));
}

}  // namespace oodgate::det
