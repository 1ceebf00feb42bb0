#include "oodgate/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "oodgate/errors.hpp"

namespace oodgate::gallery {

Gallery build_gallery(std::vector<EmbeddingRecord> records,
                      std::string source_tag) {
  if (records.empty()) throw EmptyGalleryError("gallery needs at least one record");
  const std::size_t dim = records.front().vector.size();
  if (dim == 0) throw DimensionError("gallery dimension must be at least 1");

  std::unordered_set<std::string> ids;
  for (auto& rec : records) {
    if (rec.id.empty()) throw DuplicateIdError("empty record id in gallery");
    if (!ids.insert(rec.id).second) {
      throw DuplicateIdError("duplicate gallery id '" + rec.id + "'");
    }
    if (rec.vector.size() != dim) {
      throw DimensionError("record '" + rec.id + "' has dimension " +
                           std::to_string(rec.vector.size()) + ", expected " +
                           std::to_string(dim));
    }
    rec.vector = numerics::l2_normalize(rec.vector);
  }

  Gallery g;
  g.dimension_ = dim;
  g.records_ = std::move(records);
  g.source_tag_ = std::move(source_tag);
  return g;
}

SimilarityResult query_similarity(const Gallery& g, const EmbeddingRecord& q,
                                  std::size_t k) {
  if (k == 0) throw ConfigError("k must be at least 1");
  if (q.vector.size() != g.dimension()) {
    throw DimensionError("query '" + q.id + "' has dimension " +
                         std::to_string(q.vector.size()) + ", gallery has " +
                         std::to_string(g.dimension()));
  }
  numerics::require_finite(q.vector);
  const double qnorm = numerics::l2_norm(q.vector);
  if (qnorm == 0.0) {
    throw DegenerateVectorError("query '" + q.id + "' is the zero vector");
  }

  const auto& recs = g.records();
  std::vector<double> sims(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    sims[i] = std::clamp(numerics::dot(q.vector, recs[i].vector) / qnorm,
                         -1.0, 1.0);
  }

  SimilarityResult r;
  r.query_id = q.id;
  r.k_requested = k;
  r.k_used = std::min(k, recs.size());

  std::vector<std::size_t> order(recs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + r.k_used, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (sims[a] != sims[b]) return sims[a] > sims[b];
                      return a < b;
                    });

  double sum = 0.0;
  r.neighbors.reserve(r.k_used);
  for (std::size_t i = 0; i < r.k_used; ++i) {
    r.neighbors.push_back({recs[order[i]].id, sims[order[i]]});
    sum += sims[order[i]];
  }
  r.aggregate =
      std::clamp(sum / static_cast<double>(r.k_used), -1.0, 1.0);
  return r;
}

const char* to_string(Domain d) {
  return d == Domain::InDomain ? "InDomain" : "OOD";
}

std::optional<Domain> parse_domain(std::string_view text) {
  if (text == "InDomain") return Domain::InDomain;
  if (text == "OOD" || text == "OutOfDomain") return Domain::OutOfDomain;
  return std::nullopt;
}

DomainDecision decide(const SimilarityResult& r, double threshold) {
  DomainDecision d;
  d.query_id = r.query_id;
  d.aggregate = r.aggregate;
  d.threshold = threshold;
  d.verdict = r.aggregate >= threshold ? Domain::InDomain : Domain::OutOfDomain;
  return d;
}

DomainDecision gate(const Gallery& g, const EmbeddingRecord& q,
                    double threshold, std::size_t k) {
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    throw ConfigError("threshold must lie in [-1, 1]");
  }
  return decide(query_similarity(g, q, k), threshold);
}

DomainAccuracyReport evaluate_domain_accuracy(
    const std::vector<DomainDecision>& decisions,
    const std::vector<DomainLabel>& labels) {
  std::unordered_map<std::string, const DomainLabel*> by_id;
  for (const auto& l : labels) {
    if (!by_id.emplace(l.id, &l).second) {
      throw LabelMismatchError("label id '" + l.id + "' appears more than once");
    }
  }
  if (decisions.empty()) throw NoSamplesError("no decisions to evaluate");

  std::map<std::string, CategoryAccuracy> per_category;
  std::unordered_set<std::string> seen;
  DomainAccuracyReport report;
  for (const auto& d : decisions) {
    if (!seen.insert(d.query_id).second) {
      throw LabelMismatchError("decision id '" + d.query_id +
                               "' appears more than once");
    }
    const auto it = by_id.find(d.query_id);
    if (it == by_id.end()) {
      throw LabelMismatchError("no label for decision id '" + d.query_id + "'");
    }
    const DomainLabel& label = *it->second;
    const bool correct = d.verdict == label.truth;

    auto& cat = per_category[label.category];
    cat.category = label.category;
    ++cat.total;
    if (correct) ++cat.correct;

    if (label.truth == Domain::InDomain) {
      ++report.total_in_domain;
      if (correct) ++report.correct_in_domain;
    } else {
      ++report.total_out_of_domain;
      if (correct) ++report.correct_out_of_domain;
    }
  }

  for (auto& [name, cat] : per_category) {
    cat.accuracy =
        static_cast<double>(cat.correct) / static_cast<double>(cat.total);
    report.per_category.push_back(cat);
  }
  report.overall_accuracy =
      static_cast<double>(report.correct_in_domain +
                          report.correct_out_of_domain) /
      static_cast<double>(report.total_in_domain + report.total_out_of_domain);
  return report;
}

void persist_gallery(const Gallery& g, const std::filesystem::path& path) {
  formats::write_vector_file(path, VectorFileKind::Gallery, g.dimension(),
                             g.records());
}

Gallery load_gallery(const std::filesystem::path& path) {
  const std::string bytes = formats::read_file(path);
  VectorFile file = formats::decode_vector_file(bytes, VectorFileKind::Gallery);
  if (file.records.empty()) {
    throw EmptyGalleryError("gallery file '" + path.string() + "' has no records");
  }
  // Record offsets are recomputed to point unit-norm violations at the file.
  std::size_t offset = bytes.find('\n') + 1;
  for (const auto& rec : file.records) {
    offset += 2 + rec.id.size();
    const double norm = numerics::l2_norm(rec.vector);
    if (std::abs(norm - 1.0) > 1e-6) {
      throw FormatError("gallery vector '" + rec.id + "' is not unit-norm",
                        offset);
    }
    offset += 4 * rec.vector.size();
  }
  Gallery g;
  g.dimension_ = file.dimension;
  g.records_ = std::move(file.records);
  g.source_tag_ = path.string();
  return g;
}

}  // namespace oodgate::gallery
