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

#include "dietnet/bloom.hpp"

#include "dietnet/codec.hpp"
#include "dietnet/crypto.hpp"
#include "dietnet/errors.hpp"

namespace dietnet {

BloomFilter::BloomFilter(std::uint32_t m, std::uint8_t h) : m_{m}, h_{h} {
    if (m == 0) throw ParamError("bloom filter needs m > 0 bits");
    if (h == 0) throw ParamError("bloom filter needs h >= 1 hash functions");
    bits_.assign((static_cast<std::size_t>(m) + 7) / 8, 0);
}

BloomFilter BloomFilter::build(std::span<const Bytes> keys, std::uint32_t m, std::uint8_t h) {
    BloomFilter filter(m, h);
    for (const auto& key : keys) filter.insert(key);
    return filter;
}

std::uint32_t BloomFilter::index(ByteSpan key, std::uint8_t i) const {
    Bytes buf(key.begin(), key.end());
    buf.push_back(i);
    auto d = hash256(buf);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v = (v << 8) | d.bytes[b];
    return static_cast<std::uint32_t>(v % m_);
}

void BloomFilter::insert(ByteSpan key) {
    for (std::uint8_t i = 0; i < h_; ++i) {
        auto bit = index(key, i);
        bits_[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
    }
}

bool BloomFilter::contains(ByteSpan key) const {
    for (std::uint8_t i = 0; i < h_; ++i) {
        auto bit = index(key, i);
        if ((bits_[bit / 8] & (1u << (bit % 8))) == 0) return false;
    }
    return true;
}

Bytes BloomFilter::encode() const {
    Writer w;
    w.u32(m_);
    w.u8(h_);
    w.raw(bits_);
    return std::move(w).take();
}

BloomFilter BloomFilter::decode(ByteSpan data) {
    Reader r(data);
    auto m = r.u32();
    auto h = r.u8();
    if (m == 0 || h == 0) r.fail("bloom filter parameters must be nonzero");
    if (r.remaining() < (static_cast<std::size_t>(m) + 7) / 8) r.fail("truncated bloom filter bits");
    BloomFilter filter(m, h);
    auto raw = r.raw(filter.bits_.size());
    std::copy(raw.begin(), raw.end(), filter.bits_.begin());
    if (m % 8 != 0) {
        auto used_mask = static_cast<std::uint8_t>((1u << (m % 8)) - 1);
        if ((filter.bits_.back() & ~used_mask) != 0) r.fail("bloom filter padding bits set");
    }
    r.expect_end();
    return filter;
}

}  // namespace dietnet
