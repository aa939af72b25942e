//==============================================================================
// Copyright (c) 2026 The topisum Authors.
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
//==============================================================================
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "topisum/errors.hpp"

namespace topisum {

// Little-endian byte buffer builder used by every on-disk format.
class BinaryWriter {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    auto bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bytes_.push_back(static_cast<char>((bits >> (8 * i)) & 0xFFu));
    }
  }

  void put_bytes(std::string_view raw) { bytes_.append(raw); }

  template <typename T>
  void put_span(std::span<const T> values) {
    for (const T& v : values) put(v);
  }

  const std::string& bytes() const noexcept { return bytes_; }
  std::string take() && { return std::move(bytes_); }

 private:
  std::string bytes_;
};

// Cursor over an in-memory byte image. Reads past the end throw IoError.
class BinaryReader {
 public:
  explicit BinaryReader(std::span<const char> bytes) : bytes_(bytes) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    require(sizeof(T));
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<U>(static_cast<std::uint8_t>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  std::string get_bytes(std::size_t n) {
    require(n);
    std::string out(bytes_.data() + pos_, n);
    pos_ += n;
    return out;
  }

  template <typename T>
  void get_into(std::span<T> out) {
    require(out.size() * sizeof(T));
    for (T& v : out) v = get<T>();
  }

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  bool at_end() const noexcept { return pos_ == bytes_.size(); }

  // Context string attached to truncation errors, e.g. the current record key.
  void set_context(std::string context) { context_ = std::move(context); }

 private:
  void require(std::size_t n) const {
    if (bytes_.size() - pos_ < n) {
      std::string msg = "truncated input: need " + std::to_string(n) + " bytes at offset " +
                        std::to_string(pos_) + ", have " + std::to_string(bytes_.size() - pos_);
      if (!context_.empty()) msg += " (while reading " + context_ + ")";
      throw IoError(msg);
    }
  }

  std::span<const char> bytes_;
  std::size_t pos_ = 0;
  std::string context_;
};

std::vector<char> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

// Hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace topisum
