#include "oodgate/config.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "oodgate/errors.hpp"
#include "oodgate/formats.hpp"

namespace oodgate::pipeline {

using nlohmann::json;

void validate(const PipelineConfig& c) {
  if (!(c.threshold >= -1.0 && c.threshold <= 1.0)) {
    throw ConfigError("threshold must lie in [-1, 1], got " +
                      std::to_string(c.threshold));
  }
  if (c.k < 1) throw ConfigError("k must be at least 1");
  if (!(c.iou_threshold > 0.0 && c.iou_threshold <= 1.0)) {
    throw ConfigError("iou threshold must lie in (0, 1], got " +
                      std::to_string(c.iou_threshold));
  }
  backbone::validate(c.weights);
}

backbone::Weights parse_weights(std::string_view text) {
  double w[3];
  std::size_t field = 0;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string_view part =
        text.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                         : comma - pos);
    if (field >= 3) throw WeightError("expected exactly three weights");
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), w[field]);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw WeightError("malformed weight '" + std::string(part) + "'");
    }
    ++field;
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (field != 3) throw WeightError("expected exactly three weights");
  backbone::Weights out{w[0], w[1], w[2]};
  backbone::validate(out);
  return out;
}

OutputFormat parse_format(std::string_view text) {
  if (text == "json") return OutputFormat::Json;
  if (text == "csv") return OutputFormat::Csv;
  throw ConfigError("format must be json or csv, got '" + std::string(text) + "'");
}

xai::PccMode parse_pcc_mode(std::string_view text) {
  if (text == "uncentered") return xai::PccMode::Uncentered;
  if (text == "centered") return xai::PccMode::Centered;
  throw ConfigError("pcc mode must be uncentered or centered");
}

det::ApInterpolation parse_ap_mode(std::string_view text) {
  if (text == "all-point") return det::ApInterpolation::AllPoint;
  if (text == "101-point") return det::ApInterpolation::Recall101;
  throw ConfigError("ap interpolation must be all-point or 101-point");
}

PipelineConfig config_from_json(const json& j,
                                const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "threshold") {
        c.threshold = value.get<double>();
      } else if (key == "k") {
        const auto k = value.get<long long>();
        if (k < 1) throw ConfigError("k must be at least 1");
        c.k = static_cast<std::size_t>(k);
      } else if (key == "iou_threshold") {
        c.iou_threshold = value.get<double>();
      } else if (key == "weights") {
        const auto w = value.get<std::vector<double>>();
        if (w.size() != 3) throw WeightError("expected exactly three weights");
        c.weights = {w[0], w[1], w[2]};
      } else if (key == "output_dir") {
        const std::filesystem::path p = value.get<std::string>();
        c.output_dir = p.is_absolute() ? p : base_dir / p;
      } else if (key == "format") {
        c.format = parse_format(value.get<std::string>());
      } else if (key == "pcc") {
        c.pcc_mode = parse_pcc_mode(value.get<std::string>());
      } else if (key == "ap_interpolation") {
        c.ap_mode = parse_ap_mode(value.get<std::string>());
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  validate(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(formats::read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

json to_json(const PipelineConfig& c) {
  return {
      {"threshold", c.threshold},
      {"k", c.k},
      {"iou_threshold", c.iou_threshold},
      {"weights", {c.weights.accuracy, c.weights.efficiency, c.weights.robustness}},
      {"format", c.format == OutputFormat::Json ? "json" : "csv"},
      {"pcc", c.pcc_mode == xai::PccMode::Uncentered ? "uncentered" : "centered"},
      {"ap_interpolation",
       c.ap_mode == det::ApInterpolation::AllPoint ? "all-point" : "101-point"},
  };
}

}  // namespace oodgate::pipeline
