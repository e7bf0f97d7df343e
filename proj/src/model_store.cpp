// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/model_store.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <set>
#include <sstream>

#include <json.hpp>
#include <zlib.h>

#include "bytes.hpp"
#include "csv.hpp"
#include "edgenet/error.hpp"

namespace edgenet {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'E', 'I', 'D', 'M'};

std::size_t bitmap_bytes(std::size_t n) { return (n + 7) / 8; }

std::size_t popcount(std::span<const std::uint8_t> bits) {
  std::size_t n = 0;
  for (auto b : bits) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

std::vector<std::uint32_t> dims_of(Eigen::Index rows, Eigen::Index cols, bool is_vector) {
  if (is_vector) return {static_cast<std::uint32_t>(rows)};
  return {static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols)};
}

template <class T>
void append_le(std::vector<std::uint8_t>& out, T v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(T));
}

template <class T>
T read_le(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

std::string kind_name(ModelKind kind) { return to_string(kind); }

std::string descriptor_for(const Architecture& arch, ModelKind kind, const QuantOptions* q,
                           const SparsityMask* mask) {
  json d;
  d["format"] = "EIDM";
  d["kind"] = kind_name(kind);
  d["input_size"] = arch.input_size;
  d["hidden_sizes"] = arch.hidden_sizes;
  d["dropout_rate"] = arch.dropout_rate;
  d["tied_output_gate"] = arch.tied_output_gate;
  if (q) {
    d["q_min"] = q->q_min;
    d["q_max"] = q->q_max;
  }
  if (mask) d["sparsity"] = mask->current_sparsity;
  return d.dump();
}

struct Descriptor {
  Architecture arch;
  double sparsity = 0.0;
};

Descriptor parse_descriptor(const std::string& text) {
  try {
    const auto d = json::parse(text);
    Descriptor out;
    out.arch.input_size = d.at("input_size").get<int>();
    out.arch.hidden_sizes = d.at("hidden_sizes").get<std::vector<int>>();
    out.arch.dropout_rate = d.at("dropout_rate").get<double>();
    out.arch.tied_output_gate = d.at("tied_output_gate").get<bool>();
    if (d.contains("sparsity")) out.sparsity = d.at("sparsity").get<double>();
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadFormat, std::string("architecture descriptor: ") + e.what());
  }
}

TensorRecord float_record(const std::string& name, const double* data, std::size_t n,
                          std::vector<std::uint32_t> dims, const Mask* mask) {
  TensorRecord rec;
  rec.name = name;
  rec.dtype = DType::kFloat32;
  rec.dims = std::move(dims);
  if (mask) {
    rec.encoding = Encoding::kBitmap;
    rec.payload = pack_bitmap(*mask);
    for (std::size_t i = 0; i < n; ++i) {
      if ((*mask)[i]) append_le<float>(rec.payload, static_cast<float>(data[i]));
      else if (data[i] != 0.0)
        throw Error(ErrorCode::kMaskViolation, name + "[" + std::to_string(i) + "] is pruned but nonzero");
    }
  } else {
    rec.payload.reserve(n * 4);
    for (std::size_t i = 0; i < n; ++i) append_le<float>(rec.payload, static_cast<float>(data[i]));
  }
  return rec;
}

// Decodes a float32 record into n doubles; fills mask_out for bitmap encodings.
std::vector<double> decode_float(const TensorRecord& rec, Mask* mask_out) {
  const auto n = rec.element_count();
  std::vector<double> out(n, 0.0);
  const std::uint8_t* p = rec.payload.data();
  if (rec.encoding == Encoding::kDense) {
    for (std::size_t i = 0; i < n; ++i) out[i] = read_le<float>(p + 4 * i);
    return out;
  }
  const Mask mask = unpack_bitmap({p, bitmap_bytes(n)}, n);
  const std::uint8_t* v = p + bitmap_bytes(n);
  for (std::size_t i = 0; i < n; ++i)
    if (mask[i]) {
      out[i] = read_le<float>(v);
      v += 4;
    }
  if (mask_out) *mask_out = mask;
  return out;
}

template <class T>
void copy_into(T& tensor, const std::vector<double>& values, const std::string& name) {
  if (static_cast<std::size_t>(tensor.size()) != values.size())
    throw Error(ErrorCode::kBadFormat, "tensor " + name + " does not match the architecture");
  std::copy(values.begin(), values.end(), tensor.data());
}

void check_dims(const TensorRecord& rec, Eigen::Index rows, Eigen::Index cols, bool is_vector) {
  if (rec.dims != dims_of(rows, cols, is_vector))
    throw Error(ErrorCode::kBadFormat, "tensor " + rec.name + " has unexpected dimensions");
}

struct FloatLoad {
  NetworkParams net;
  SparsityMask mask;
  bool any_bitmap = false;
};

FloatLoad load_float_model(const ModelFile& file) {
  const auto desc = parse_descriptor(file.descriptor);
  FloatLoad out;
  out.net = zero_params(desc.arch);
  out.mask.current_sparsity = desc.sparsity;
  for_each_tensor(out.net, [&](const std::string& name, auto& t, bool) {
    const auto& rec = file.tensor(name);
    if (rec.dtype != DType::kFloat32) throw Error(ErrorCode::kBadFormat, name + " is not float32");
    check_dims(rec, t.rows(), t.cols(), t.IsVectorAtCompileTime);
    Mask m;
    copy_into(t, decode_float(rec, &m), name);
    if (rec.encoding == Encoding::kBitmap) {
      out.any_bitmap = true;
      out.mask.masks[name] = std::move(m);
    }
  });
  return out;
}

}  // namespace

std::size_t TensorRecord::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

const TensorRecord& ModelFile::tensor(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw Error(ErrorCode::kBadFormat, "model file lacks tensor " + name);
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = ::crc32(crc, bytes.data() + off, chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> pack_bitmap(const Mask& mask) {
  std::vector<std::uint8_t> bits(bitmap_bytes(mask.size()), 0);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) bits[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  return bits;
}

Mask unpack_bitmap(std::span<const std::uint8_t> bits, std::size_t n) {
  if (bits.size() < bitmap_bytes(n)) throw Error(ErrorCode::kBadFormat, "bitmap too short");
  Mask mask(n);
  for (std::size_t i = 0; i < n; ++i) mask[i] = (bits[i / 8] >> (i % 8)) & 1u;
  return mask;
}

std::vector<std::uint8_t> encode_model_file(const ModelFile& file) {
  detail::ByteWriter w;
  w.put_text({kMagic, 4});
  w.put<std::uint16_t>(kModelFileVersion);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(file.tensors.size()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(file.descriptor.size()));
  w.put_text(file.descriptor);
  std::set<std::string> names;
  for (const auto& t : file.tensors) {
    if (!names.insert(t.name).second) throw Error(ErrorCode::kBadFormat, "duplicate tensor name " + t.name);
    w.put<std::uint16_t>(static_cast<std::uint16_t>(t.name.size()));
    w.put_text(t.name);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(t.dtype));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(t.encoding));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) w.put<std::uint32_t>(d);
    if (t.dtype == DType::kInt8) {
      w.put<float>(t.scale);
      w.put<std::int32_t>(t.zero_point);
    }
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t.payload.size()));
    w.put_bytes(t.payload);
    w.put<std::uint32_t>(crc32(t.payload));
  }
  return std::move(w.bytes());
}

ModelFile decode_model_file(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  if (bytes.size() < 4 || r.get_text(4) != std::string(kMagic, 4)) throw Error(ErrorCode::kBadMagic, "not an EIDM file");
  const auto version = r.get<std::uint16_t>();
  if (version != kModelFileVersion)
    throw Error(ErrorCode::kVersionUnsupported, "model file version " + std::to_string(version));
  const auto count = r.get<std::uint16_t>();
  ModelFile file;
  file.descriptor = r.get_text(r.get<std::uint32_t>());
  std::set<std::string> names;
  for (std::uint16_t k = 0; k < count; ++k) {
    TensorRecord t;
    t.name = r.get_text(r.get<std::uint16_t>());
    if (!names.insert(t.name).second) throw Error(ErrorCode::kBadFormat, "duplicate tensor name " + t.name);
    const auto dtype = r.get<std::uint8_t>();
    const auto encoding = r.get<std::uint8_t>();
    if (dtype > 1 || encoding > 1) throw Error(ErrorCode::kBadFormat, "unknown dtype/encoding for " + t.name);
    t.dtype = static_cast<DType>(dtype);
    t.encoding = static_cast<Encoding>(encoding);
    const auto rank = r.get<std::uint8_t>();
    for (std::uint8_t d = 0; d < rank; ++d) t.dims.push_back(r.get<std::uint32_t>());
    if (t.dtype == DType::kInt8) {
      t.scale = r.get<float>();
      t.zero_point = r.get<std::int32_t>();
    }
    const auto length = r.get<std::uint32_t>();
    auto payload = r.get_bytes(length);
    t.payload.assign(payload.begin(), payload.end());
    const auto stored_crc = r.get<std::uint32_t>();
    if (crc32(t.payload) != stored_crc) throw Error(ErrorCode::kCrcMismatch, "payload of " + t.name);

    const std::size_t n = t.element_count();
    const std::size_t width = t.dtype == DType::kFloat32 ? 4 : 1;
    std::size_t expected = n * width;
    if (t.encoding == Encoding::kBitmap) {
      if (length < bitmap_bytes(n)) throw Error(ErrorCode::kBadFormat, "bitmap too short for " + t.name);
      expected = bitmap_bytes(n) + width * popcount({t.payload.data(), bitmap_bytes(n)});
    }
    if (length != expected)
      throw Error(ErrorCode::kBadFormat, "payload length of " + t.name + " does not match its dims/encoding");
    file.tensors.push_back(std::move(t));
  }
  if (r.remaining() != 0) throw Error(ErrorCode::kBadFormat, "trailing bytes after the last tensor");
  return file;
}

void write_model_file(const ModelFile& file, const std::filesystem::path& path) {
  write_file_atomic(path, encode_model_file(file));
}

ModelFile read_model_file(const std::filesystem::path& path) { return decode_model_file(read_file(path)); }

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kDense: return "dense";
    case ModelKind::kSparse: return "sparse";
    case ModelKind::kQuantized: return "quantized";
    case ModelKind::kSparseQuantized: return "sparse-quantized";
  }
  return "unknown";
}

ModelFile to_dense_file(const NetworkParams& net) {
  ModelFile file;
  file.descriptor = descriptor_for(architecture_of(net), ModelKind::kDense, nullptr, nullptr);
  for_each_tensor(net, [&](const std::string& name, const auto& t, bool) {
    if (!t.allFinite()) throw Error(ErrorCode::kBadFormat, "non-finite value in " + name);
    file.tensors.push_back(float_record(name, t.data(), static_cast<std::size_t>(t.size()),
                                        dims_of(t.rows(), t.cols(), t.IsVectorAtCompileTime), nullptr));
  });
  return file;
}

ModelFile to_sparse_file(const NetworkParams& net, const SparsityMask& mask) {
  ModelFile file;
  file.descriptor = descriptor_for(architecture_of(net), ModelKind::kSparse, nullptr, &mask);
  for_each_tensor(net, [&](const std::string& name, const auto& t, bool is_weight) {
    if (!t.allFinite()) throw Error(ErrorCode::kBadFormat, "non-finite value in " + name);
    const Mask* m = nullptr;
    if (is_weight) {
      auto it = mask.masks.find(name);
      if (it == mask.masks.end()) throw Error(ErrorCode::kMaskViolation, "no mask for " + name);
      if (it->second.size() != static_cast<std::size_t>(t.size()))
        throw Error(ErrorCode::kMaskViolation, "mask size for " + name);
      m = &it->second;
    }
    file.tensors.push_back(float_record(name, t.data(), static_cast<std::size_t>(t.size()),
                                        dims_of(t.rows(), t.cols(), t.IsVectorAtCompileTime), m));
  });
  return file;
}

ModelFile to_quantized_file(const QuantizedModel& qm) {
  const NetworkParams shape = zero_params(qm.arch);
  QuantOptions q;
  if (!qm.weights.empty()) {
    q.q_min = qm.weights.begin()->second.params.q_min;
    q.q_max = qm.weights.begin()->second.params.q_max;
  }
  ModelFile file;
  const auto kind = qm.mask ? ModelKind::kSparseQuantized : ModelKind::kQuantized;
  file.descriptor = descriptor_for(qm.arch, kind, &q, qm.mask ? &*qm.mask : nullptr);
  for_each_tensor(shape, [&](const std::string& name, const auto& t, bool is_weight) {
    const auto dims = dims_of(t.rows(), t.cols(), t.IsVectorAtCompileTime);
    if (!is_weight) {
      const auto& b = qm.biases.at(name);
      TensorRecord rec;
      rec.name = name;
      rec.dims = dims;
      for (float v : b) append_le<float>(rec.payload, v);
      file.tensors.push_back(std::move(rec));
      return;
    }
    const auto& qt = qm.weights.at(name);
    TensorRecord rec;
    rec.name = name;
    rec.dtype = DType::kInt8;
    rec.dims = dims;
    rec.scale = static_cast<float>(qt.params.scale);
    rec.zero_point = qt.params.zero_point;
    const Mask* m = nullptr;
    if (qm.mask) {
      auto it = qm.mask->masks.find(name);
      if (it != qm.mask->masks.end()) m = &it->second;
    }
    if (m) {
      rec.encoding = Encoding::kBitmap;
      rec.payload = pack_bitmap(*m);
      for (std::size_t i = 0; i < qt.values.size(); ++i) {
        if ((*m)[i]) rec.payload.push_back(static_cast<std::uint8_t>(qt.values[i]));
        else if (qt.values[i] != qt.params.zero_point)
          throw Error(ErrorCode::kMaskViolation, name + "[" + std::to_string(i) + "] is pruned but not at the zero point");
      }
    } else {
      rec.payload.reserve(qt.values.size());
      for (auto v : qt.values) rec.payload.push_back(static_cast<std::uint8_t>(v));
    }
    file.tensors.push_back(std::move(rec));
  });
  return file;
}

void save_dense(const NetworkParams& net, const std::filesystem::path& path) {
  write_model_file(to_dense_file(net), path);
}

NetworkParams load_dense(const std::filesystem::path& path) {
  return load_float_model(read_model_file(path)).net;
}

void save_sparse(const NetworkParams& net, const SparsityMask& mask, const std::filesystem::path& path) {
  write_model_file(to_sparse_file(net, mask), path);
}

std::pair<NetworkParams, SparsityMask> load_sparse(const std::filesystem::path& path) {
  auto loaded = load_float_model(read_model_file(path));
  if (!loaded.any_bitmap) throw Error(ErrorCode::kBadFormat, path.string() + " holds no bitmap-sparse tensors");
  return {std::move(loaded.net), std::move(loaded.mask)};
}

void save_quantized(const QuantizedModel& qm, const std::filesystem::path& path) {
  write_model_file(to_quantized_file(qm), path);
}

namespace {

QuantizedModel quantized_from_file(const ModelFile& file) {
  const auto desc = parse_descriptor(file.descriptor);
  int q_min = -128, q_max = 127;
  try {
    const auto d = json::parse(file.descriptor);
    q_min = d.value("q_min", -128);
    q_max = d.value("q_max", 127);
  } catch (const json::exception&) {
  }
  QuantizedModel qm;
  qm.arch = desc.arch;
  SparsityMask mask;
  mask.current_sparsity = desc.sparsity;
  const NetworkParams shape = zero_params(desc.arch);
  for_each_tensor(shape, [&](const std::string& name, const auto& t, bool is_weight) {
    const auto& rec = file.tensor(name);
    check_dims(rec, t.rows(), t.cols(), t.IsVectorAtCompileTime);
    const auto n = rec.element_count();
    if (!is_weight) {
      if (rec.dtype != DType::kFloat32 || rec.encoding != Encoding::kDense)
        throw Error(ErrorCode::kBadFormat, "bias " + name + " must be dense float32");
      auto& b = qm.biases[name];
      for (std::size_t i = 0; i < n; ++i) b.push_back(read_le<float>(rec.payload.data() + 4 * i));
      return;
    }
    if (rec.dtype != DType::kInt8) throw Error(ErrorCode::kBadFormat, name + " is not int8");
    QuantizedTensor qt;
    qt.rows = t.rows();
    qt.cols = t.cols();
    qt.params.scale = rec.scale;
    qt.params.zero_point = rec.zero_point;
    qt.params.q_min = q_min;
    qt.params.q_max = q_max;
    qt.values.assign(n, static_cast<std::int8_t>(rec.zero_point));
    if (rec.encoding == Encoding::kBitmap) {
      Mask m = unpack_bitmap({rec.payload.data(), bitmap_bytes(n)}, n);
      const std::uint8_t* v = rec.payload.data() + bitmap_bytes(n);
      for (std::size_t i = 0; i < n; ++i)
        if (m[i]) qt.values[i] = static_cast<std::int8_t>(*v++);
      mask.masks[name] = std::move(m);
    } else {
      for (std::size_t i = 0; i < n; ++i) qt.values[i] = static_cast<std::int8_t>(rec.payload[i]);
    }
    // Calibration range is not stored; recover the representable range.
    qt.params.f_min = dequantize_value(q_min, qt.params);
    qt.params.f_max = dequantize_value(q_max, qt.params);
    qm.weights[name] = std::move(qt);
  });
  if (!mask.masks.empty()) qm.mask = std::move(mask);
  return qm;
}

}  // namespace

QuantizedModel load_quantized(const std::filesystem::path& path) {
  return quantized_from_file(read_model_file(path));
}

LoadedModel load_model(const std::filesystem::path& path) {
  const auto file = read_model_file(path);
  bool any_int8 = false, any_bitmap = false;
  for (const auto& t : file.tensors) {
    any_int8 |= t.dtype == DType::kInt8;
    any_bitmap |= t.encoding == Encoding::kBitmap;
  }
  LoadedModel out;
  if (any_int8) {
    out.quantized = quantized_from_file(file);
    out.params = dequantize_model(*out.quantized);
    out.mask = out.quantized->mask;
    out.kind = any_bitmap ? ModelKind::kSparseQuantized : ModelKind::kQuantized;
    return out;
  }
  auto loaded = load_float_model(file);
  out.params = std::move(loaded.net);
  if (loaded.any_bitmap) out.mask = std::move(loaded.mask);
  out.kind = any_bitmap ? ModelKind::kSparse : ModelKind::kDense;
  return out;
}

std::string dump_model(const std::filesystem::path& path) {
  const auto file = read_model_file(path);
  std::ostringstream os;
  os << "file: " << path.string() << " (" << std::filesystem::file_size(path) << " bytes)\n";
  os << "descriptor: " << file.descriptor << "\n";
  os << "tensors: " << file.tensors.size() << "\n";
  os << "name\tdtype\tencoding\tdims\tscale\tzero_point\tpayload_bytes\tcrc32\n";
  for (const auto& t : file.tensors) {
    std::string dims;
    for (std::size_t k = 0; k < t.dims.size(); ++k) dims += (k ? "x" : "") + std::to_string(t.dims[k]);
    char crc[16];
    std::snprintf(crc, sizeof crc, "%08x", crc32(t.payload));
    os << t.name << '\t' << (t.dtype == DType::kInt8 ? "int8" : "float32") << '\t'
       << (t.encoding == Encoding::kBitmap ? "bitmap" : "dense") << '\t' << dims << '\t';
    if (t.dtype == DType::kInt8) os << detail::exact(t.scale) << '\t' << t.zero_point;
    else os << "-\t-";
    os << '\t' << t.payload.size() << '\t' << crc << '\n';
  }
  return os.str();
}

SizeReport size_report(const std::vector<std::filesystem::path>& paths, const std::filesystem::path& baseline) {
  auto size_of = [](const std::filesystem::path& p) {
    std::error_code ec;
    const auto n = std::filesystem::file_size(p, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot stat " + p.string());
    return n;
  };
  SizeReport report;
  report.baseline_bytes = size_of(baseline);
  report.entries.push_back({baseline.string(), baseline.stem().string(), report.baseline_bytes, 1.0, std::nullopt});
  for (const auto& p : paths) {
    const auto bytes = size_of(p);
    SizeEntry e;
    e.path = p.string();
    e.name = p.stem().string();
    e.bytes = bytes;
    e.ratio = bytes == 0 ? 0.0 : static_cast<double>(report.baseline_bytes) / static_cast<double>(bytes);
    report.entries.push_back(std::move(e));
  }
  return report;
}

std::string size_report_csv(const SizeReport& report) {
  std::string out = "file,name,accuracy,size_bytes,ratio,size_change\n";
  for (std::size_t k = 0; k < report.entries.size(); ++k) {
    const auto& e = report.entries[k];
    out += detail::csv_field(e.path) + "," + detail::csv_field(e.name) + ",";
    if (e.accuracy) out += detail::fixed(*e.accuracy, 4);
    out += "," + std::to_string(e.bytes) + "," + detail::fixed(e.ratio, 4) + ",";
    if (k > 0) out += detail::fixed(e.ratio >= 1.0 ? -e.ratio : 1.0 / std::max(e.ratio, 1e-300), 2);
    out += "\n";
  }
  return out;
}

}  // namespace edgenet
