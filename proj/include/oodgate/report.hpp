#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oodgate/config.hpp"
#include "oodgate/pipeline.hpp"

namespace oodgate::pipeline {

inline constexpr const char* kToolName = "oodgate";
const char* tool_version();

struct Report {
  std::string command;
  nlohmann::json config;
  std::map<std::string, std::string> inputs;  // path -> sha256

  std::optional<GalleryOutput> gallery;
  std::optional<GateOutput> gate;
  std::optional<SweepOutput> sweep;
  std::optional<DetectionOutput> detection;
  std::optional<XaiOutput> xai;
  std::optional<RankOutput> ranking;

  // True when any stage that ran had nothing to evaluate.
  bool has_empty_result() const;
};

nlohmann::json to_json(const Report& r);

// Reals with 6 significant digits, trailing zeros kept ("0.947000").
std::string format_real(double v);

// Pretty JSON: sorted keys, two-space indent, reals via format_real.
std::string render_json(const nlohmann::json& j);

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<CsvTable> to_csv_tables(const Report& r);
std::string render_csv(const CsvTable& t);

// Writes <dir>/<command>.json, or <dir>/<command>_<table>.csv per table.
// Returns the written paths; IoError when the destination is unwritable.
std::vector<std::filesystem::path> emit_report(const Report& r, OutputFormat format,
                                               const std::filesystem::path& dir);

}  // namespace oodgate::pipeline
