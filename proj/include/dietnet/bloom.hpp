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

#include <cstdint>
#include <span>
#include <vector>

#include "dietnet/bytes.hpp"

namespace dietnet {

/**
 * Bloom filter a light client sends instead of its raw keys.
 *
 * Index i of a key is the first 8 bytes of hash256(key || i), read big-endian, mod m.
 * Wire form: m (u32 LE), h (u8), then ceil(m/8) bytes where bit i lives in byte i/8 under
 * mask 1 << (i % 8).
 */
class BloomFilter {
  public:
    static constexpr std::uint32_t kDefaultBits = 2048;
    static constexpr std::uint8_t kDefaultHashes = 7;

    //! Empty filter. Throws ParamError when m == 0 or h == 0.
    BloomFilter(std::uint32_t m, std::uint8_t h);

    [[nodiscard]] static BloomFilter build(std::span<const Bytes> keys, std::uint32_t m = kDefaultBits,
                                           std::uint8_t h = kDefaultHashes);

    void insert(ByteSpan key);
    [[nodiscard]] bool contains(ByteSpan key) const;

    [[nodiscard]] std::uint32_t bit_count() const { return m_; }
    [[nodiscard]] std::uint8_t hash_count() const { return h_; }

    [[nodiscard]] Bytes encode() const;
    //! Throws DecodeError on bad lengths, zero parameters or stray padding bits.
    [[nodiscard]] static BloomFilter decode(ByteSpan data);

    friend bool operator==(const BloomFilter&, const BloomFilter&) = default;

  private:
    [[nodiscard]] std::uint32_t index(ByteSpan key, std::uint8_t i) const;

    std::uint32_t m_;
    std::uint8_t h_;
    std::vector<std::uint8_t> bits_;
};

}  // namespace dietnet
