#include "oodgate/errors.hpp"

namespace oodgate {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "DimensionError";
    case ErrorKind::DegenerateVector: return "DegenerateVectorError";
    case ErrorKind::EmptyInput: return "EmptyInputError";
    case ErrorKind::EmptyGallery: return "EmptyGalleryError";
    case ErrorKind::DuplicateId: return "DuplicateIdError";
    case ErrorKind::Format: return "FormatError";
    case ErrorKind::LabelMismatch: return "LabelMismatchError";
    case ErrorKind::InvalidBox: return "InvalidBoxError";
    case ErrorKind::UndefinedRecall: return "UndefinedRecallError";
    case ErrorKind::NoSamples: return "NoSamplesError";
    case ErrorKind::Weight: return "WeightError";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::EmptyMask: return "EmptyMaskError";
    case ErrorKind::MissingFile: return "MissingFileError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Weight:
    case ErrorKind::Config:
      return 1;
    case ErrorKind::NoSamples:
      return 3;
    default:
      return 2;
  }
}

}  // namespace oodgate
