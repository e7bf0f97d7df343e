// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edgenet {

enum class ErrorCode {
  // data_pipeline
  kMissingColumn,
  kParseError,
  kEmptyFile,
  kUnknownCategory,
  kBadRatios,
  kBadSchema,
  // lstm_net / optimizer / pruning
  kDimensionMismatch,
  kCacheMismatch,
  kEmptyTensor,
  kEpochOutOfRange,
  // dsd_trainer
  kNonFiniteLoss,
  // model_store
  kIoError,
  kBadMagic,
  kCrcMismatch,
  kVersionUnsupported,
  kMaskViolation,
  kBadFormat,
  // metrics
  kLengthMismatch,
  kEmptyInput,
  kSingleClassInput,
  // cli
  kBadConfig,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code identifies the failure
// kind named in the module contracts.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& detail)
      : Error(ErrorCode::kParseError,
              "row " + std::to_string(row) + ", column '" + column + "': " + detail),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

}  // namespace edgenet
