#pragma once

// Bit-exact readers and writers for the toolkit's binary interchange files.
//
//   EMBV1 / GALV1   "<MAGIC> <dim> <count>\n" then <count> records of
//                   uint16le id length, id bytes, <dim> float32le values.
//                   GALV1 additionally guarantees unit-norm vectors.
//   HMPV1           "HMPV1 <H> <W>\n" then H*W float32le, row-major.
//   MSKV1           "MSKV1 <H> <W>\n" then H*W bytes, each 0x00 or 0x01.
//
// All readers throw FormatError carrying the byte offset of the problem.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oodgate/numerics.hpp"
#include "oodgate/saliency.hpp"

namespace oodgate {

struct EmbeddingRecord {
  std::string id;
  numerics::FeatureVector vector;
};

enum class VectorFileKind { Embeddings, Gallery };

std::string_view magic_for(VectorFileKind kind);

struct VectorFile {
  VectorFileKind kind = VectorFileKind::Embeddings;
  std::size_t dimension = 0;
  std::vector<EmbeddingRecord> records;
};

namespace formats {

std::string encode_vector_file(VectorFileKind kind, std::size_t dimension,
                               std::span<const EmbeddingRecord> records);
// `expected` pins the magic; pass nothing to accept either.
VectorFile decode_vector_file(std::string_view bytes);
VectorFile decode_vector_file(std::string_view bytes, VectorFileKind expected);

std::string encode_heatmap(const xai::Heatmap& h);
xai::Heatmap decode_heatmap(std::string_view bytes);

std::string encode_mask(const xai::BinaryMask& m);
xai::BinaryMask decode_mask(std::string_view bytes);

// Whole-file helpers. Read failures raise IoError.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

void write_vector_file(const std::filesystem::path& path, VectorFileKind kind,
                       std::size_t dimension,
                       std::span<const EmbeddingRecord> records);
VectorFile read_vector_file(const std::filesystem::path& path);
VectorFile read_vector_file(const std::filesystem::path& path,
                            VectorFileKind expected);

void write_heatmap(const std::filesystem::path& path, const xai::Heatmap& h);
xai::Heatmap read_heatmap(const std::filesystem::path& path);

void write_mask(const std::filesystem::path& path, const xai::BinaryMask& m);
xai::BinaryMask read_mask(const std::filesystem::path& path);

}  // namespace formats
}  // namespace oodgate
