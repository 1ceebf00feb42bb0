#include "oodgate/formats.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "oodgate/errors.hpp"

namespace oodgate {

std::string_view magic_for(VectorFileKind kind) {
  return kind == VectorFileKind::Gallery ? "GALV1" : "EMBV1";
}

namespace formats {
namespace {

constexpr std::size_t kMaxHeaderBytes = 64;
constexpr std::uint64_t kMaxExtent = std::uint64_t{1} << 28;

struct Header {
  std::string magic;
  std::uint64_t first = 0;
  std::uint64_t second = 0;
  std::size_t payload_offset = 0;
};

std::uint64_t parse_field(std::string_view text, std::size_t offset) {
  std::uint64_t value = 0;
  if (text.empty() || text.front() == '+' || text.front() == '-') {
    throw FormatError("malformed header field", offset);
  }
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("malformed header field '" + std::string(text) + "'",
                      offset);
  }
  if (value > kMaxExtent) {
    throw FormatError("header field out of range", offset);
  }
  return value;
}

// "<MAGIC> <a> <b>\n", single spaces, decimal fields.
Header parse_header(std::string_view bytes) {
  const std::size_t newline =
      bytes.substr(0, kMaxHeaderBytes).find('\n');
  if (newline == std::string_view::npos) {
    throw FormatError("missing header line terminator", 0);
  }
  const std::string_view line = bytes.substr(0, newline);
  const std::size_t s1 = line.find(' ');
  const std::size_t s2 =
      s1 == std::string_view::npos ? s1 : line.find(' ', s1 + 1);
  if (s1 == std::string_view::npos || s2 == std::string_view::npos ||
      line.find(' ', s2 + 1) != std::string_view::npos) {
    throw FormatError("header must be '<MAGIC> <a> <b>'", 0);
  }
  Header h;
  h.magic = std::string(line.substr(0, s1));
  h.first = parse_field(line.substr(s1 + 1, s2 - s1 - 1), s1 + 1);
  h.second = parse_field(line.substr(s2 + 1), s2 + 1);
  h.payload_offset = newline + 1;
  return h;
}

void append_u16le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void append_f32le(std::string& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((bits >> shift) & 0xFF));
  }
}

// Bounds-checked little-endian cursor over an in-memory file.
class Reader {
 public:
  explicit Reader(std::string_view bytes, std::size_t pos)
      : bytes_(bytes), pos_(pos) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(std::string("truncated payload reading ") + what,
                        pos_);
    }
  }

  std::uint16_t u16(const char* what) {
    need(2, what);
    const auto b0 = static_cast<std::uint8_t>(bytes_[pos_]);
    const auto b1 = static_cast<std::uint8_t>(bytes_[pos_ + 1]);
    pos_ += 2;
    return static_cast<std::uint16_t>(b0 | (b1 << 8));
  }

  float f32(const char* what) {
    need(4, what);
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) {
      bits |= static_cast<std::uint32_t>(
                  static_cast<std::uint8_t>(bytes_[pos_ + i]))
              << (8 * i);
    }
    pos_ += 4;
    return std::bit_cast<float>(bits);
  }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_;
};

void require_consumed(const Reader& r) {
  if (!r.at_end()) throw FormatError("trailing bytes after payload", r.pos());
}

std::string header_line(std::string_view magic, std::uint64_t a,
                        std::uint64_t b) {
  std::string out(magic);
  out += ' ';
  out += std::to_string(a);
  out += ' ';
  out += std::to_string(b);
  out += '\n';
  return out;
}

VectorFile decode_vector_impl(std::string_view bytes,
                              const VectorFileKind* expected) {
  const Header h = parse_header(bytes);
  VectorFile file;
  if (h.magic == "EMBV1") {
    file.kind = VectorFileKind::Embeddings;
  } else if (h.magic == "GALV1") {
    file.kind = VectorFileKind::Gallery;
  } else {
    throw FormatError("unknown magic '" + h.magic + "'", 0);
  }
  if (expected != nullptr && file.kind != *expected) {
    throw FormatError("expected magic " + std::string(magic_for(*expected)) +
                          ", found " + h.magic,
                      0);
  }
  if (h.first == 0) throw FormatError("dimension must be at least 1", 6);
  file.dimension = static_cast<std::size_t>(h.first);

  Reader r(bytes, h.payload_offset);
  std::unordered_set<std::string> seen;
  file.records.reserve(static_cast<std::size_t>(
      std::min<std::uint64_t>(h.second, 1u << 16)));
  for (std::uint64_t i = 0; i < h.second; ++i) {
    const std::size_t record_start = r.pos();
    const std::uint16_t id_len = r.u16("id length");
    if (id_len == 0) throw FormatError("empty record id", record_start);
    EmbeddingRecord rec;
    rec.id = std::string(r.take(id_len, "id bytes"));
    if (!seen.insert(rec.id).second) {
      throw DuplicateIdError("duplicate id '" + rec.id + "' at offset " +
                             std::to_string(record_start));
    }
    rec.vector.resize(file.dimension);
    const std::size_t values_start = r.pos();
    for (auto& v : rec.vector) v = r.f32("vector values");
    for (std::size_t k = 0; k < rec.vector.size(); ++k) {
      if (!std::isfinite(rec.vector[k])) {
        throw FormatError("non-finite vector value", values_start + 4 * k);
      }
    }
    file.records.push_back(std::move(rec));
  }
  require_consumed(r);
  return file;
}

}  // namespace

std::string encode_vector_file(VectorFileKind kind, std::size_t dimension,
                               std::span<const EmbeddingRecord> records) {
  if (dimension == 0) throw DimensionError("dimension must be at least 1");
  std::string out = header_line(magic_for(kind), dimension, records.size());
  out.reserve(out.size() + records.size() * (2 + 16 + 4 * dimension));
  for (const auto& rec : records) {
    if (rec.id.empty() ||
        rec.id.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw FormatError("record id length must be in [1, 65535]", out.size());
    }
    if (rec.vector.size() != dimension) {
      throw DimensionError("record '" + rec.id + "' has dimension " +
                           std::to_string(rec.vector.size()) + ", expected " +
                           std::to_string(dimension));
    }
    append_u16le(out, static_cast<std::uint16_t>(rec.id.size()));
    out += rec.id;
    for (float v : rec.vector) append_f32le(out, v);
  }
  return out;
}

VectorFile decode_vector_file(std::string_view bytes) {
  return decode_vector_impl(bytes, nullptr);
}

VectorFile decode_vector_file(std::string_view bytes,
                              VectorFileKind expected) {
  return decode_vector_impl(bytes, &expected);
}

std::string encode_heatmap(const xai::Heatmap& h) {
  xai::validate(h);
  std::string out = header_line("HMPV1", h.height, h.width);
  for (float v : h.values) append_f32le(out, v);
  return out;
}

xai::Heatmap decode_heatmap(std::string_view bytes) {
  const Header hdr = parse_header(bytes);
  if (hdr.magic != "HMPV1") {
    throw FormatError("expected magic HMPV1, found " + hdr.magic, 0);
  }
  if (hdr.first == 0 || hdr.second == 0) {
    throw FormatError("raster dimensions must be at least 1", 6);
  }
  xai::Heatmap h;
  h.height = static_cast<std::size_t>(hdr.first);
  h.width = static_cast<std::size_t>(hdr.second);
  Reader r(bytes, hdr.payload_offset);
  r.need(h.height * h.width * 4, "heatmap values");
  h.values.resize(h.height * h.width);
  for (std::size_t i = 0; i < h.values.size(); ++i) {
    const std::size_t at = r.pos();
    const float v = r.f32("heatmap values");
    if (!std::isfinite(v) || v < 0.0f || v > 1.0f) {
      throw FormatError("heatmap value outside [0, 1]", at);
    }
    h.values[i] = v;
  }
  require_consumed(r);
  return h;
}

std::string encode_mask(const xai::BinaryMask& m) {
  xai::validate(m);
  std::string out = header_line("MSKV1", m.height, m.width);
  for (std::uint8_t v : m.values) out.push_back(static_cast<char>(v));
  return out;
}

xai::BinaryMask decode_mask(std::string_view bytes) {
  const Header hdr = parse_header(bytes);
  if (hdr.magic != "MSKV1") {
    throw FormatError("expected magic MSKV1, found " + hdr.magic, 0);
  }
  if (hdr.first == 0 || hdr.second == 0) {
    throw FormatError("raster dimensions must be at least 1", 6);
  }
  xai::BinaryMask m;
  m.height = static_cast<std::size_t>(hdr.first);
  m.width = static_cast<std::size_t>(hdr.second);
  Reader r(bytes, hdr.payload_offset);
  r.need(m.height * m.width, "mask values");
  m.values.resize(m.height * m.width);
  for (auto& v : m.values) {
    const std::size_t at = r.pos();
    v = r.u8("mask values");
    if (v > 1) throw FormatError("mask byte must be 0x00 or 0x01", at);
  }
  require_consumed(r);
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_vector_file(const std::filesystem::path& path, VectorFileKind kind,
                       std::size_t dimension,
                       std::span<const EmbeddingRecord> records) {
  write_file(path, encode_vector_file(kind, dimension, records));
}

VectorFile read_vector_file(const std::filesystem::path& path) {
  return decode_vector_file(read_file(path));
}

VectorFile read_vector_file(const std::filesystem::path& path,
                            VectorFileKind expected) {
  return decode_vector_file(read_file(path), expected);
}

void write_heatmap(const std::filesystem::path& path, const xai::Heatmap& h) {
  write_file(path, encode_heatmap(h));
}

xai::Heatmap read_heatmap(const std::filesystem::path& path) {
  return decode_heatmap(read_file(path));
}

void write_mask(const std::filesystem::path& path, const xai::BinaryMask& m) {
  write_file(path, encode_mask(m));
}

xai::BinaryMask read_mask(const std::filesystem::path& path) {
  return decode_mask(read_file(path));
}

}  // namespace formats
}  // namespace oodgate
