// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/error.hpp"

namespace edgenet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kBadRatios: return "BadRatios";
    case ErrorCode::kBadSchema: return "BadSchema";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kCacheMismatch: return "CacheMismatch";
    case ErrorCode::kEmptyTensor: return "EmptyTensor";
    case ErrorCode::kEpochOutOfRange: return "EpochOutOfRange";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kCrcMismatch: return "CrcMismatch";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kMaskViolation: return "MaskViolation";
    case ErrorCode::kBadFormat: return "BadFormat";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kSingleClassInput: return "SingleClassInput";
    case ErrorCode::kBadConfig: return "BadConfig";
  }
  return "Unknown";
}

}  // namespace edgenet
