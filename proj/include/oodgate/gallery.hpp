#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oodgate/formats.hpp"
#include "oodgate/numerics.hpp"

namespace oodgate::gallery {

inline constexpr double kDefaultThreshold = 0.85;
inline constexpr std::size_t kDefaultK = 1;

// In-domain reference store. Vectors are L2-normalized once at build time and
// the gallery is immutable afterwards, so concurrent queries are safe.
class Gallery {
 public:
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return records_.size(); }
  const std::vector<EmbeddingRecord>& records() const { return records_; }
  const std::string& source_tag() const { return source_tag_; }

 private:
  friend Gallery build_gallery(std::vector<EmbeddingRecord> records,
                               std::string source_tag);
  friend Gallery load_gallery(const std::filesystem::path& path);

  std::size_t dimension_ = 0;
  std::vector<EmbeddingRecord> records_;
  std::string source_tag_;
};

// Throws EmptyGalleryError, DuplicateIdError, DimensionError, or
// DegenerateVectorError (zero or non-finite vector).
Gallery build_gallery(std::vector<EmbeddingRecord> records,
                      std::string source_tag = {});

struct Neighbor {
  std::string gallery_id;
  double similarity = 0.0;
};

struct SimilarityResult {
  std::string query_id;
  std::vector<Neighbor> neighbors;  // non-increasing similarity
  double aggregate = 0.0;           // mean similarity of the neighbors
  std::size_t k_requested = 0;
  std::size_t k_used = 0;           // k clamped to the gallery size
};

// Exhaustive exact top-k cosine search. Equal similarities are ordered by
// gallery insertion order.
SimilarityResult query_similarity(const Gallery& g, const EmbeddingRecord& q,
                                  std::size_t k = kDefaultK);

enum class Domain { InDomain, OutOfDomain };

const char* to_string(Domain d);
std::optional<Domain> parse_domain(std::string_view text);

struct DomainDecision {
  std::string query_id;
  Domain verdict = Domain::OutOfDomain;
  double aggregate = 0.0;
  double threshold = kDefaultThreshold;
};

// InDomain iff aggregate >= threshold.
DomainDecision decide(const SimilarityResult& r, double threshold);

DomainDecision gate(const Gallery& g, const EmbeddingRecord& q,
                    double threshold = kDefaultThreshold,
                    std::size_t k = kDefaultK);

struct DomainLabel {
  std::string id;
  Domain truth = Domain::InDomain;
  std::string category;
};

struct CategoryAccuracy {
  std::string category;
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;  // fraction in [0, 1]
};

struct DomainAccuracyReport {
  std::vector<CategoryAccuracy> per_category;  // ordered by category name
  double overall_accuracy = 0.0;               // fraction in [0, 1]
  std::size_t correct_in_domain = 0;
  std::size_t correct_out_of_domain = 0;
  std::size_t total_in_domain = 0;
  std::size_t total_out_of_domain = 0;
};

// Every decision id must occur exactly once in `labels`, else
// LabelMismatchError. Labels without a decision are ignored.
DomainAccuracyReport evaluate_domain_accuracy(
    const std::vector<DomainDecision>& decisions,
    const std::vector<DomainLabel>& labels);

// GALV1 on disk. The source tag has no slot in the format; a loaded gallery
// is tagged with the path it came from.
void persist_gallery(const Gallery& g, const std::filesystem::path& path);
Gallery load_gallery(const std::filesystem::path& path);

}  // namespace oodgate::gallery
