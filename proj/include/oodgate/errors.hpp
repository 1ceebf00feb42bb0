#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oodgate {

enum class ErrorKind {
  Dimension,
  DegenerateVector,
  EmptyInput,
  EmptyGallery,
  DuplicateId,
  Format,
  LabelMismatch,
  InvalidBox,
  UndefinedRecall,
  NoSamples,
  Weight,
  Config,
  EmptyMask,
  MissingFile,
  Io,
};

const char* to_string(ErrorKind kind);

// Base of every error the toolkit raises. The kind drives the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define OODGATE_DEFINE_ERROR(Name, Kind)                                  \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& message) : Error(Kind, message) {}   \
  };

OODGATE_DEFINE_ERROR(DimensionError, ErrorKind::Dimension)
OODGATE_DEFINE_ERROR(DegenerateVectorError, ErrorKind::DegenerateVector)
OODGATE_DEFINE_ERROR(EmptyInputError, ErrorKind::EmptyInput)
OODGATE_DEFINE_ERROR(EmptyGalleryError, ErrorKind::EmptyGallery)
OODGATE_DEFINE_ERROR(DuplicateIdError, ErrorKind::DuplicateId)
OODGATE_DEFINE_ERROR(LabelMismatchError, ErrorKind::LabelMismatch)
OODGATE_DEFINE_ERROR(InvalidBoxError, ErrorKind::InvalidBox)
OODGATE_DEFINE_ERROR(UndefinedRecallError, ErrorKind::UndefinedRecall)
OODGATE_DEFINE_ERROR(NoSamplesError, ErrorKind::NoSamples)
OODGATE_DEFINE_ERROR(WeightError, ErrorKind::Weight)
OODGATE_DEFINE_ERROR(ConfigError, ErrorKind::Config)
OODGATE_DEFINE_ERROR(EmptyMaskError, ErrorKind::EmptyMask)
OODGATE_DEFINE_ERROR(IoError, ErrorKind::Io)

#undef OODGATE_DEFINE_ERROR

// Parse failure in one of the binary or text formats. `offset` is a byte
// offset for binary files and a 1-based line number for line-oriented ones.
class FormatError : public Error {
 public:
  FormatError(const std::string& message, std::size_t offset)
      : Error(ErrorKind::Format,
              message + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class MissingFileError : public Error {
 public:
  struct Offender {
    std::string id;
    std::string path;
  };

  explicit MissingFileError(std::vector<Offender> offenders)
      : Error(ErrorKind::MissingFile, describe(offenders)),
        offenders_(std::move(offenders)) {}
  const std::vector<Offender>& offenders() const noexcept { return offenders_; }

 private:
  static std::string describe(const std::vector<Offender>& offenders) {
    std::string msg = "missing referenced files:";
    for (const auto& o : offenders) msg += " [" + o.id + ": " + o.path + "]";
    return msg;
  }
  std::vector<Offender> offenders_;
};

// Process exit codes: 0 success, 1 usage/config, 2 data/format, 3 empty result.
int exit_code_for(ErrorKind kind);

}  // namespace oodgate
