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

#include "dietnet/codec.hpp"

#include <limits>

namespace dietnet {

void Writer::count16(std::size_t n, std::string_view what) {
    if (n > std::numeric_limits<std::uint16_t>::max()) {
        throw ParamError("too many " + std::string(what) + " to encode: " + std::to_string(n));
    }
    u16(static_cast<std::uint16_t>(n));
}

Digest32 Reader::digest() {
    Digest32 d;
    d.bytes = fixed<32>();
    return d;
}

ByteSpan Reader::raw(std::size_t n) {
    if (remaining() < n) fail("truncated input: need " + std::to_string(n) + " bytes");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

void Reader::expect_end() const {
    if (remaining() != 0) fail(std::to_string(remaining()) + " trailing bytes");
}

std::uint64_t Reader::get_le(std::size_t width) {
    auto src = raw(width);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(src[i]) << (8 * i);
    return v;
}

}  // namespace dietnet
