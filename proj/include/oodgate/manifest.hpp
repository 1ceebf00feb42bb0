#pragma once

// Manifest: a JSON object listing the images of one evaluation run.
//
//   {"entries": [{"image_id": "img-001",
//                 "domain_label": "InDomain" | "OOD",        (optional)
//                 "category": "in_domain_test",               (optional)
//                 "embedding_ref": "emb/test.emb",
//                 "detections_ref": "det/preds.jsonl",        (optional)
//                 "heatmap_ref": "xai/img-001.hmp",           (optional)
//                 "mask_ref": "xai/img-001.msk",              (optional)
//                 "model_tag": "yolov8"}]}                    (optional)
//
// References resolve against the manifest's directory. An embedding or
// detections file may be shared by many entries; each entry picks out the
// records carrying its own image_id.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oodgate/gallery.hpp"

namespace oodgate::pipeline {

struct ManifestEntry {
  std::string image_id;
  std::optional<gallery::Domain> domain_label;
  std::optional<std::string> category;
  std::string embedding_ref;
  std::optional<std::string> detections_ref;
  std::optional<std::string> heatmap_ref;
  std::optional<std::string> mask_ref;
  std::optional<std::string> model_tag;

  // Category used for accuracy rows: the explicit one, else the label name.
  std::string category_or_label() const;
};

struct Manifest {
  std::filesystem::path base_dir;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const std::string& ref) const;
};

// Structural parse only. FormatError on malformed JSON or fields,
// DuplicateIdError on repeated image ids.
Manifest parse_manifest_text(std::string_view text,
                             const std::filesystem::path& base_dir);

// Parses and checks that every referenced file exists; MissingFileError lists
// every offending (id, path) pair.
Manifest parse_manifest(const std::filesystem::path& path);

}  // namespace oodgate::pipeline
