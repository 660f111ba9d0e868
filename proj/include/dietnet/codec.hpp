/*
   Copyright 2026 The dietnet Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string_view>

#include "dietnet/bytes.hpp"
#include "dietnet/errors.hpp"

namespace dietnet {

// Little-endian fixed-width writer. Every wire format in the project goes through it.
class Writer {
  public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { put_le(v, 2); }
    void u32(std::uint32_t v) { put_le(v, 4); }
    void u64(std::uint64_t v) { put_le(v, 8); }
    void digest(const Digest32& d) { raw(d.span()); }
    void raw(ByteSpan data) { buf_.insert(buf_.end(), data.begin(), data.end()); }

    //! 16-bit element count; throws ParamError when the list is too long to encode.
    void count16(std::size_t n, std::string_view what);

    [[nodiscard]] std::size_t size() const { return buf_.size(); }
    [[nodiscard]] Bytes take() && { return std::move(buf_); }
    [[nodiscard]] const Bytes& bytes() const { return buf_; }

  private:
    void put_le(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    Bytes buf_;
};

class Reader {
  public:
    explicit Reader(ByteSpan data) : data_{data} {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get_le(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get_le(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get_le(4)); }
    std::uint64_t u64() { return get_le(8); }
    Digest32 digest();
    ByteSpan raw(std::size_t n);

    template <std::size_t N>
    std::array<std::uint8_t, N> fixed() {
        std::array<std::uint8_t, N> out{};
        auto src = raw(N);
        std::copy(src.begin(), src.end(), out.begin());
        return out;
    }

    //! Throws DecodeError when bytes remain.
    void expect_end() const;

    [[nodiscard]] std::size_t offset() const { return pos_; }
    [[nodiscard]] std::size_t remaining() const { return data_.size() - pos_; }

    [[noreturn]] void fail(const std::string& what) const { throw DecodeError(what, pos_); }

  private:
    std::uint64_t get_le(std::size_t width);

    ByteSpan data_;
    std::size_t pos_{0};
};

}  // namespace dietnet
