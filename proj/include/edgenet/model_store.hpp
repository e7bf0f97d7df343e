// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgenet/io.hpp"
#include "edgenet/lstm_net.hpp"
#include "edgenet/pruning.hpp"
#include "edgenet/quantizer.hpp"

namespace edgenet {

// Model container layout (all integers little-endian):
//
//   "EIDM" | u16 version=1 | u16 tensor_count
//   u32 descriptor_length | descriptor (UTF-8 JSON)
//   per tensor:
//     u16 name_length | name
//     u8 dtype (0=float32, 1=int8) | u8 encoding (0=dense, 1=bitmap) | u8 rank
//     u32 dims[rank]
//     int8 only: f32 scale | i32 zero_point
//     u32 payload_length | payload | u32 CRC-32 of payload
//
// Bitmap payloads are ceil(N/8) mask bytes (LSB-first) followed by the kept
// values in index order.

inline constexpr std::uint16_t kModelFileVersion = 1;

enum class DType : std::uint8_t { kFloat32 = 0, kInt8 = 1 };
enum class Encoding : std::uint8_t { kDense = 0, kBitmap = 1 };

struct TensorRecord {
  std::string name;
  DType dtype = DType::kFloat32;
  Encoding encoding = Encoding::kDense;
  std::vector<std::uint32_t> dims;
  float scale = 1.0f;
  std::int32_t zero_point = 0;
  std::vector<std::uint8_t> payload;

  std::size_t element_count() const;
};

struct ModelFile {
  std::string descriptor;  // architecture JSON
  std::vector<TensorRecord> tensors;

  const TensorRecord& tensor(const std::string& name) const;
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_model_file(const ModelFile& file);
ModelFile decode_model_file(std::span<const std::uint8_t> bytes);

void write_model_file(const ModelFile& file, const std::filesystem::path& path);
ModelFile read_model_file(const std::filesystem::path& path);

// Bitmap helpers shared by the float and int8 sparse encodings.
std::vector<std::uint8_t> pack_bitmap(const Mask& mask);
Mask unpack_bitmap(std::span<const std::uint8_t> bits, std::size_t n);

enum class ModelKind { kDense, kSparse, kQuantized, kSparseQuantized };

std::string to_string(ModelKind kind);

ModelFile to_dense_file(const NetworkParams& net);
ModelFile to_sparse_file(const NetworkParams& net, const SparsityMask& mask);
ModelFile to_quantized_file(const QuantizedModel& qm);

void save_dense(const NetworkParams& net, const std::filesystem::path& path);
NetworkParams load_dense(const std::filesystem::path& path);

// Throws kMaskViolation if a masked entry of net is nonzero.
void save_sparse(const NetworkParams& net, const SparsityMask& mask, const std::filesystem::path& path);
std::pair<NetworkParams, SparsityMask> load_sparse(const std::filesystem::path& path);

void save_quantized(const QuantizedModel& qm, const std::filesystem::path& path);
QuantizedModel load_quantized(const std::filesystem::path& path);

struct LoadedModel {
  ModelKind kind = ModelKind::kDense;
  // Float parameters used for inference (dequantized for int8 files).
  NetworkParams params;
  std::optional<SparsityMask> mask;
  std::optional<QuantizedModel> quantized;
};

LoadedModel load_model(const std::filesystem::path& path);

// Human-readable tensor table.
std::string dump_model(const std::filesystem::path& path);

struct SizeEntry {
  std::string path;
  std::string name;
  std::uintmax_t bytes = 0;
  double ratio = 1.0;  // baseline_bytes / bytes
  std::optional<double> accuracy;
};

struct SizeReport {
  std::uintmax_t baseline_bytes = 0;
  std::vector<SizeEntry> entries;  // baseline first
};

SizeReport size_report(const std::vector<std::filesystem::path>& paths,
                       const std::filesystem::path& baseline);

// CSV with columns file,name,accuracy,size_bytes,ratio,size_change; size_change
// uses the negative-multiplier convention (-3.76 for a 3.76x smaller file).
std::string size_report_csv(const SizeReport& report);

}  // namespace edgenet
