#pragma once

// JSON-lines interchange for detections and ground truth, one object per line:
//   {"image_id": "a", "class_id": 0, "bbox": [x1, y1, x2, y2], "confidence": 0.93}
// Ground truth lines omit "confidence". Coordinates are pixel corners in the
// 640x640 normalized frame. Blank lines are skipped; any malformed line raises
// FormatError with its 1-based line number as the offset.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oodgate/detection.hpp"

namespace oodgate::det {

std::vector<Detection> parse_detections(std::string_view text);
std::vector<GroundTruthBox> parse_ground_truth(std::string_view text);

std::string to_jsonl(const std::vector<Detection>& dets);
std::string to_jsonl(const std::vector<GroundTruthBox>& gts);

std::vector<Detection> read_detections(const std::filesystem::path& path);
std::vector<GroundTruthBox> read_ground_truth(const std::filesystem::path& path);

}  // namespace oodgate::det
