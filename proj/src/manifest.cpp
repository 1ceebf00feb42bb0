#include "oodgate/manifest.hpp"

#include <unordered_set>

#include <json.hpp>

#include "oodgate/errors.hpp"
#include "oodgate/formats.hpp"

namespace oodgate::pipeline {
namespace {

using nlohmann::json;

std::optional<std::string> optional_string(const json& obj, const char* key,
                                           std::size_t index) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string() || it->get<std::string>().empty()) {
    throw FormatError(std::string("entry field '") + key +
                          "' must be a non-empty string",
                      index);
  }
  return it->get<std::string>();
}

}  // namespace

std::string ManifestEntry::category_or_label() const {
  if (category) return *category;
  return domain_label ? gallery::to_string(*domain_label) : "unlabeled";
}

std::filesystem::path Manifest::resolve(const std::string& ref) const {
  const std::filesystem::path p = ref;
  return p.is_absolute() ? p : base_dir / p;
}

Manifest parse_manifest_text(std::string_view text,
                             const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("manifest is not valid JSON: ") + e.what(),
                      e.byte);
  }
  if (!root.is_object() || !root.contains("entries") ||
      !root["entries"].is_array()) {
    throw FormatError("manifest must be an object with an 'entries' array", 0);
  }

  Manifest m;
  m.base_dir = base_dir;
  std::unordered_set<std::string> ids;
  const auto& entries = root["entries"];
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const json& e = entries[i];
    if (!e.is_object()) throw FormatError("manifest entry is not an object", i);
    ManifestEntry entry;
    const auto id = optional_string(e, "image_id", i);
    if (!id) throw FormatError("manifest entry without 'image_id'", i);
    entry.image_id = *id;
    if (!ids.insert(entry.image_id).second) {
      throw DuplicateIdError("duplicate image_id '" + entry.image_id +
                             "' in manifest");
    }
    if (const auto label = optional_string(e, "domain_label", i)) {
      entry.domain_label = gallery::parse_domain(*label);
      if (!entry.domain_label) {
        throw FormatError("domain_label must be InDomain or OOD, got '" +
                              *label + "'",
                          i);
      }
    }
    entry.category = optional_string(e, "category", i);
    const auto emb = optional_string(e, "embedding_ref", i);
    if (!emb) {
      throw FormatError("entry '" + entry.image_id + "' has no embedding_ref", i);
    }
    entry.embedding_ref = *emb;
    entry.detections_ref = optional_string(e, "detections_ref", i);
    entry.heatmap_ref = optional_string(e, "heatmap_ref", i);
    entry.mask_ref = optional_string(e, "mask_ref", i);
    entry.model_tag = optional_string(e, "model_tag", i);
    m.entries.push_back(std::move(entry));
  }
  return m;
}

Manifest parse_manifest(const std::filesystem::path& path) {
  Manifest m = parse_manifest_text(formats::read_file(path), path.parent_path());
  std::vector<MissingFileError::Offender> missing;
  auto check = [&](const std::string& id, const std::optional<std::string>& ref) {
    if (ref && !std::filesystem::is_regular_file(m.resolve(*ref))) {
      missing.push_back({id, *ref});
    }
  };
  for (const auto& e : m.entries) {
    check(e.image_id, e.embedding_ref);
    check(e.image_id, e.detections_ref);
    check(e.image_id, e.heatmap_ref);
    check(e.image_id, e.mask_ref);
  }
  if (!missing.empty()) throw MissingFileError(std::move(missing));
  return m;
}

}  // namespace oodgate::pipeline
