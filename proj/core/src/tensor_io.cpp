// Copyright 2026 The ropelab Authors
// SPDX-License-Identifier: Apache-2.0

#include "ropelab/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "ropelab/errors.hpp"

namespace ropelab {

namespace {

constexpr char kMagic[8] = {'R', 'P', 'L', 'T', 'E', 'N', 'S', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

[[noreturn]] void malformed(const std::string& why) {
  throw TensorLoadError(TensorLoadError::Code::malformed_container, why);
}

[[noreturn]] void bad_shape(const std::string& why) {
  throw TensorLoadError(TensorLoadError::Code::shape_mismatch, why);
}

}  // namespace

void save_weights(const AttentionStack& stack, const std::string& path) {
  const int d = stack.d_model();
  if (stack.num_layers() < 1 || stack.heads < 1 || d < 1) {
    throw ConfigError("cannot save an uninitialized stack");
  }
  for (const LayerWeights& layer : stack.layers) {
    if (layer.w_q.rows != d || layer.w_q.cols != d || layer.w_k.rows != d ||
        layer.w_k.cols != d) {
      throw ConfigError("weight matrices must be d_model x d_model");
    }
  }

  // nlohmann::json keeps object keys sorted, so the header bytes are a pure
  // function of the dimensions and saving is deterministic.
  const nlohmann::json header{
      {"layers", stack.num_layers()}, {"heads", stack.heads},
      {"d_model", d},                 {"dtype", "f32"},
      {"order", "row-major"},
  };
  const std::string header_bytes = header.dump();

  std::string blob;
  blob.append(kMagic, sizeof(kMagic));
  put_u32(blob, static_cast<std::uint32_t>(header_bytes.size()));
  blob += header_bytes;
  for (const LayerWeights& layer : stack.layers) {
    for (const Matrix* m : {&layer.w_q, &layer.w_k}) {
      for (double v : m->data) {
        put_u32(blob, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      }
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) {
    throw std::runtime_error("short write: " + path);
  }
}

AttentionStack load_weights(const std::string& path, double rotary_base,
                            RotaryLayout rotary_layout) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    malformed("cannot open: " + path);
  }
  std::string blob((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) {
    malformed("read failure: " + path);
  }
  const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());

  if (blob.size() < sizeof(kMagic) + 4) {
    malformed("file too short for magic and header length");
  }
  if (blob.compare(0, sizeof(kMagic), kMagic, sizeof(kMagic)) != 0) {
    malformed("bad magic");
  }
  const std::uint32_t header_len = get_u32(bytes + sizeof(kMagic));
  const std::size_t header_off = sizeof(kMagic) + 4;
  if (blob.size() < header_off + header_len) {
    malformed("truncated header");
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.begin() + header_off,
                                   blob.begin() + header_off + header_len);
  } catch (const nlohmann::json::exception& e) {
    malformed(std::string("header is not valid JSON: ") + e.what());
  }
  if (!header.is_object()) malformed("header is not a JSON object");
  for (const char* key : {"layers", "heads", "d_model"}) {
    if (!header.contains(key) || !header[key].is_number_integer()) {
      malformed(std::string("header field missing or non-integer: ") + key);
    }
  }
  if (!header.contains("dtype") || header["dtype"] != "f32") {
    malformed("header dtype must be \"f32\"");
  }
  if (!header.contains("order") || header["order"] != "row-major") {
    malformed("header order must be \"row-major\"");
  }
  const auto layers = header["layers"].get<std::int64_t>();
  const auto heads = header["heads"].get<std::int64_t>();
  const auto d_model = header["d_model"].get<std::int64_t>();
  if (layers < 1 || heads < 1 || d_model < 1) {
    bad_shape("dimensions must be positive");
  }
  if (d_model % heads != 0) {
    bad_shape("d_model must be a multiple of heads");
  }
  const std::int64_t head_dim = d_model / heads;
  if (head_dim < 2 || head_dim % 2 != 0) {
    bad_shape("head_dim (d_model / heads) must be even and >= 2");
  }
  const std::size_t expect =
      static_cast<std::size_t>(layers) * 2u * static_cast<std::size_t>(d_model) *
      static_cast<std::size_t>(d_model) * 4u;
  const std::size_t payload_off = header_off + header_len;
  if (blob.size() - payload_off != expect) {
    bad_shape("payload holds " + std::to_string(blob.size() - payload_off) +
              " bytes, header implies " + std::to_string(expect));
  }

  AttentionStack stack;
  stack.heads = static_cast<int>(heads);
  stack.rotary = make_rotary_config(static_cast<int>(head_dim), rotary_base,
                                    rotary_layout);
  stack.layers.resize(static_cast<std::size_t>(layers));
  const unsigned char* p = bytes + payload_off;
  for (LayerWeights& layer : stack.layers) {
    for (Matrix* m : {&layer.w_q, &layer.w_k}) {
      *m = Matrix(static_cast<int>(d_model), static_cast<int>(d_model));
      for (double& v : m->data) {
        const float f = std::bit_cast<float>(get_u32(p));
        p += 4;
        if (!std::isfinite(f)) {
          throw TensorLoadError(TensorLoadError::Code::non_finite,
                                "payload holds a non-finite value");
        }
        v = static_cast<double>(f);
      }
    }
  }
  return stack;
}

}  // namespace ropelab
