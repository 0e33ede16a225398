// Copyright 2026 The advocr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "advocr/error.h"
#include "advocr/recognizer.h"

namespace advocr {
namespace {

constexpr char kMagic[4] = {'C', 'T', 'C', 'M'};

class Writer {
 public:
  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void F64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      out_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
    }
  }
  void Bytes(std::string_view s) { out_.append(s); }
  void String(std::string_view s) {
    U32(static_cast<std::uint32_t>(s.size()));
    Bytes(s);
  }
  std::string Take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view Bytes(std::size_t n) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError("weight file truncated at byte " + std::to_string(pos_));
    }
    const std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t U32() {
    const std::string_view b = Bytes(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    }
    return v;
  }
  double F64() {
    const std::string_view b = Bytes(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    }
    return std::bit_cast<double>(bits);
  }
  std::string String(std::size_t limit) {
    const std::uint32_t n = U32();
    if (n > limit) throw FormatError("weight file string length " + std::to_string(n) + " too large");
    return std::string(Bytes(n));
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeParams(const ModelParams& params) {
  const ModelConfig& c = params.config();
  Writer w;
  w.Bytes(std::string_view(kMagic, 4));
  w.U32(kWeightFormatVersion);
  w.U32(static_cast<std::uint32_t>(c.input_height));
  w.U32(static_cast<std::uint32_t>(c.conv_channels));
  w.U32(static_cast<std::uint32_t>(c.vertical_hidden));
  w.U32(static_cast<std::uint32_t>(c.horizontal_hidden));
  w.String(c.alphabet.symbols());
  w.U32(static_cast<std::uint32_t>(params.tensors().size()));
  for (const auto& [name, t] : params.tensors()) {
    w.String(name);
    w.U32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape()) w.U32(static_cast<std::uint32_t>(d));
    for (double v : t.data()) w.F64(v);
  }
  return w.Take();
}

ModelParams DeserializeParams(std::string_view bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not a weight file (bad magic bytes)");
  }
  r.Bytes(4);
  const std::uint32_t version = r.U32();
  if (version != kWeightFormatVersion) {
    throw FormatError("unsupported weight format version " +
                      std::to_string(version) + " (expected " +
                      std::to_string(kWeightFormatVersion) + ")");
  }
  ModelConfig config;
  config.input_height = r.U32();
  config.conv_channels = r.U32();
  config.vertical_hidden = r.U32();
  config.horizontal_hidden = r.U32();
  config.alphabet = Alphabet(r.String(256));
  config.Validate();

  const auto expected = ModelParams::ExpectedShapes(config);
  const std::uint32_t count = r.U32();
  if (count != expected.size()) {
    throw FormatError("weight file holds " + std::to_string(count) +
                      " tensors, expected " + std::to_string(expected.size()));
  }
  std::map<std::string, Tensor> tensors;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.String(64);
    const std::uint32_t rank = r.U32();
    if (rank == 0 || rank > 4) {
      throw FormatError("tensor " + name + " has invalid rank " + std::to_string(rank));
    }
    Shape shape(rank);
    for (auto& d : shape) d = r.U32();
    auto it = expected.find(name);
    if (it == expected.end()) throw FormatError("unknown tensor " + name);
    if (it->second != shape) {
      throw ShapeError("load_params", "tensor " + name + " stored as " +
                                          ShapeToString(shape) +
                                          " but the embedded configuration (" +
                                          std::to_string(config.alphabet.size()) +
                                          " symbols) requires " +
                                          ShapeToString(it->second));
    }
    std::vector<double> values(ShapeSize(shape));
    for (double& v : values) v = r.F64();
    tensors.emplace(std::move(name), Tensor(shape, std::move(values)));
  }
  if (!r.done()) throw FormatError("trailing bytes after weight table");
  return ModelParams(std::move(config), std::move(tensors));
}

void SaveParams(const std::string& path, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  const std::string bytes = SerializeParams(params);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path);
}

ModelParams LoadParams(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return DeserializeParams(buf.str());
}

ModelParams LoadParams(const std::string& path, const ModelConfig& expected) {
  ModelParams params = LoadParams(path);
  const ModelConfig& got = params.config();
  if (got.alphabet.size() != expected.alphabet.size()) {
    throw ShapeError("load_params",
                     "model has " + std::to_string(got.num_outputs()) +
                         " output units (alphabet of " +
                         std::to_string(got.alphabet.size()) +
                         ") but " + std::to_string(expected.num_outputs()) +
                         " (alphabet of " +
                         std::to_string(expected.alphabet.size()) +
                         ") were expected");
  }
  if (!(got == expected)) {
    throw ShapeError("load_params",
                     "stored layer sizes differ from the expected configuration");
  }
  return params;
}

}  // namespace advocr
