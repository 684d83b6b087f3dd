// SPDX-License-Identifier: Apache-2.0
//
// genchan - generative modeling of geometric MIMO wireless channels
// Copyright (C) 2026 genchan contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Model checkpoint container and binary format.
//
// NNCK layout (little endian):
//   magic "NNCK", version u16
//   meta count u32; entries: key (u16 length + bytes), value (u32 length + bytes)
//   tensor count u32; manifest entries: name (u16 length + bytes), rows u32, cols u32
//   tensor payloads, f64 row-major, in manifest order
//
// Meta keys are sorted, and doubles are rendered with 17 significant digits,
// so save -> load -> save reproduces the file byte for byte.

#ifndef GENCHAN_MODEL_IO_HPP
#define GENCHAN_MODEL_IO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "genchan/common.hpp"

namespace genchan {

struct CheckpointData {
  std::map<std::string, std::string> meta;
  std::vector<std::pair<std::string, Eigen::MatrixXd>> tensors;

  void set_double(const std::string &key, double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    meta[key] = buf;
  }
  void set_int(const std::string &key, long long value) { meta[key] = std::to_string(value); }

  const std::string &get(const std::string &key) const {
    const auto it = meta.find(key);
    if (it == meta.end()) throw ShapeError("checkpoint: missing meta key '" + key + "'");
    return it->second;
  }
  double get_double(const std::string &key) const { return std::stod(get(key)); }
  long long get_int(const std::string &key) const { return std::stoll(get(key)); }
  bool has(const std::string &key) const { return meta.count(key) != 0; }
};

inline constexpr std::uint16_t kCheckpointFormatVersion = 1;

namespace detail {

inline void ckpt_write(std::ofstream &os, const void *p, std::size_t n) {
  os.write(static_cast<const char *>(p), static_cast<std::streamsize>(n));
}

inline void ckpt_read(std::ifstream &is, void *p, std::size_t n, const char *what) {
  is.read(static_cast<char *>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw TruncatedError(std::string("checkpoint: truncated while reading ") + what);
}

inline void ckpt_write_string(std::ofstream &os, const std::string &s, bool long_length) {
  if (long_length) {
    const std::uint32_t len = static_cast<std::uint32_t>(s.size());
    ckpt_write(os, &len, 4);
  } else {
    const std::uint16_t len = static_cast<std::uint16_t>(s.size());
    ckpt_write(os, &len, 2);
  }
  ckpt_write(os, s.data(), s.size());
}

inline std::string ckpt_read_string(std::ifstream &is, bool long_length, const char *what) {
  std::size_t len;
  if (long_length) {
    std::uint32_t l;
    ckpt_read(is, &l, 4, what);
    len = l;
  } else {
    std::uint16_t l;
    ckpt_read(is, &l, 2, what);
    len = l;
  }
  std::string s(len, '\0');
  if (len > 0) ckpt_read(is, s.data(), len, what);
  return s;
}

}  // namespace detail

inline void save_checkpoint(const CheckpointData &data, const std::filesystem::path &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_checkpoint: cannot open " + path.string());
  os.write("NNCK", 4);
  const std::uint16_t version = kCheckpointFormatVersion;
  detail::ckpt_write(os, &version, 2);

  const std::uint32_t meta_count = static_cast<std::uint32_t>(data.meta.size());
  detail::ckpt_write(os, &meta_count, 4);
  for (const auto &[key, value] : data.meta) {
    detail::ckpt_write_string(os, key, false);
    detail::ckpt_write_string(os, value, true);
  }

  const std::uint32_t tensor_count = static_cast<std::uint32_t>(data.tensors.size());
  detail::ckpt_write(os, &tensor_count, 4);
  for (const auto &[name, tensor] : data.tensors) {
    detail::ckpt_write_string(os, name, false);
    const std::uint32_t rows = static_cast<std::uint32_t>(tensor.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(tensor.cols());
    detail::ckpt_write(os, &rows, 4);
    detail::ckpt_write(os, &cols, 4);
  }
  for (const auto &[name, tensor] : data.tensors) {
    for (Eigen::Index i = 0; i < tensor.rows(); ++i)
      for (Eigen::Index j = 0; j < tensor.cols(); ++j) {
        const double v = tensor(i, j);
        detail::ckpt_write(os, &v, 8);
      }
  }
  if (!os) throw std::runtime_error("save_checkpoint: write failed for " + path.string());
}

inline CheckpointData load_checkpoint(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_checkpoint: cannot open " + path.string());
  char magic[4];
  detail::ckpt_read(is, magic, 4, "magic");
  if (std::string_view(magic, 4) != "NNCK")
    throw MagicError("checkpoint: bad magic in " + path.string());
  std::uint16_t version;
  detail::ckpt_read(is, &version, 2, "version");
  if (version != kCheckpointFormatVersion)
    throw VersionError("checkpoint: unsupported version " + std::to_string(version));

  CheckpointData data;
  std::uint32_t meta_count;
  detail::ckpt_read(is, &meta_count, 4, "meta count");
  for (std::uint32_t k = 0; k < meta_count; ++k) {
    std::string key = detail::ckpt_read_string(is, false, "meta key");
    std::string value = detail::ckpt_read_string(is, true, "meta value");
    data.meta.emplace(std::move(key), std::move(value));
  }

  std::uint32_t tensor_count;
  detail::ckpt_read(is, &tensor_count, 4, "tensor count");
  std::vector<std::pair<std::string, std::pair<std::uint32_t, std::uint32_t>>> manifest;
  manifest.reserve(tensor_count);
  for (std::uint32_t k = 0; k < tensor_count; ++k) {
    std::string name = detail::ckpt_read_string(is, false, "tensor name");
    std::uint32_t rows, cols;
    detail::ckpt_read(is, &rows, 4, "tensor rows");
    detail::ckpt_read(is, &cols, 4, "tensor cols");
    manifest.emplace_back(std::move(name), std::make_pair(rows, cols));
  }
  data.tensors.reserve(tensor_count);
  for (const auto &[name, shape] : manifest) {
    Eigen::MatrixXd tensor(shape.first, shape.second);
    for (std::uint32_t i = 0; i < shape.first; ++i)
      for (std::uint32_t j = 0; j < shape.second; ++j) {
        double v;
        detail::ckpt_read(is, &v, 8, "tensor payload");
        tensor(i, j) = v;
      }
    data.tensors.emplace_back(name, std::move(tensor));
  }
  if (is.peek() != std::ifstream::traits_type::eof())
    throw ShapeError("checkpoint: unexpected trailing bytes in " + path.string());
  return data;
}

}  // namespace genchan

#endif
