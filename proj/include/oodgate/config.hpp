#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "oodgate/backbone.hpp"
#include "oodgate/detection.hpp"
#include "oodgate/gallery.hpp"
#include "oodgate/saliency.hpp"

namespace oodgate::pipeline {

enum class OutputFormat { Json, Csv };

struct PipelineConfig {
  double threshold = gallery::kDefaultThreshold;
  std::size_t k = gallery::kDefaultK;
  double iou_threshold = det::kDefaultIouThreshold;
  backbone::Weights weights;
  std::filesystem::path output_dir = ".";
  OutputFormat format = OutputFormat::Json;
  xai::PccMode pcc_mode = xai::PccMode::Uncentered;
  det::ApInterpolation ap_mode = det::ApInterpolation::AllPoint;
};

// Throws ConfigError / WeightError.
void validate(const PipelineConfig& c);

// "w1,w2,w3" -> Weights (validated).
backbone::Weights parse_weights(std::string_view text);

OutputFormat parse_format(std::string_view text);
xai::PccMode parse_pcc_mode(std::string_view text);
det::ApInterpolation parse_ap_mode(std::string_view text);

// Optional JSON config mirroring PipelineConfig. Unknown keys are rejected.
// Relative output_dir values resolve against the config file's directory.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const nlohmann::json& j,
                                const std::filesystem::path& base_dir);

// Echo for reports. Leaves out output_dir so that reports written to
// different places stay byte-identical.
nlohmann::json to_json(const PipelineConfig& c);

}  // namespace oodgate::pipeline
