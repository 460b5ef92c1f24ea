// Copyright 2026 The TreeDOX Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian binary primitives for model files. Private to the library.

#ifndef TREEDOX_SRC_BINARY_IO_HPP_
#define TREEDOX_SRC_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "treedox/matrix.hpp"

namespace treedox {

static_assert(std::endian::native == std::endian::little,
              "model files assume a little-endian host");

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  void doubles(const std::vector<double>& v) {
    u64(v.size());
    bytes(v.data(), v.size() * sizeof(double));
  }
  void matrix(const Matrix& m) {
    u64(m.rows());
    u64(m.cols());
    bytes(m.data().data(), m.data().size() * sizeof(double));
  }

 private:
  std::ostream& out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  void bytes(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in_) throw std::invalid_argument("binary model: truncated input");
  }
  std::uint32_t u32() { return read<std::uint32_t>(); }
  std::uint64_t u64() { return read<std::uint64_t>(); }
  double f64() { return read<double>(); }
  std::string str() {
    std::string s(checked_size(u64(), 1), '\0');
    bytes(s.data(), s.size());
    return s;
  }
  std::vector<double> doubles() {
    std::vector<double> v(checked_size(u64(), sizeof(double)));
    bytes(v.data(), v.size() * sizeof(double));
    return v;
  }
  Matrix matrix() {
    const auto rows = u64();
    const auto cols = u64();
    std::vector<double> data(checked_size(rows * cols, sizeof(double)));
    bytes(data.data(), data.size() * sizeof(double));
    return Matrix(rows, cols, std::move(data));
  }

 private:
  template <typename T>
  T read() {
    T v;
    bytes(&v, sizeof v);
    return v;
  }
  static std::size_t checked_size(std::uint64_t n, std::size_t elem) {
    if (n > (std::uint64_t{1} << 40) / elem) {
      throw std::invalid_argument("binary model: implausible length");
    }
    return static_cast<std::size_t>(n);
  }

  std::istream& in_;
};

}  // namespace treedox

#endif  // TREEDOX_SRC_BINARY_IO_HPP_
