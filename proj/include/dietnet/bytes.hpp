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

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dietnet {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

//! 32-byte hash value. Identity of blocks, transactions and Merkle nodes.
struct Digest32 {
    std::array<std::uint8_t, 32> bytes{};

    static constexpr std::size_t kSize = 32;

    [[nodiscard]] static Digest32 from_hex(std::string_view hex);
    [[nodiscard]] std::string hex() const;
    [[nodiscard]] bool is_zero() const;

    [[nodiscard]] ByteSpan span() const { return {bytes.data(), bytes.size()}; }

    friend auto operator<=>(const Digest32&, const Digest32&) = default;
};

[[nodiscard]] std::string to_hex(ByteSpan data);
[[nodiscard]] Bytes from_hex(std::string_view hex);

}  // namespace dietnet
