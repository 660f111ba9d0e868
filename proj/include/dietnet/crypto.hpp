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
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "dietnet/bytes.hpp"

namespace dietnet {

//! SHA-256 applied twice. Used for txids, header hashes, Merkle nodes and shard leaves.
[[nodiscard]] Digest32 hash256(ByteSpan data);
[[nodiscard]] Digest32 hash256(std::string_view text);

// Wire widths. Ed25519 keys are 32 bytes; the trailing byte of a PublicKey is zero padding.
inline constexpr std::size_t kPublicKeySize = 33;
inline constexpr std::size_t kSignatureSize = 64;
inline constexpr std::size_t kPrivateKeySize = 64;
inline constexpr std::size_t kSeedSize = 32;

using PublicKey = std::array<std::uint8_t, kPublicKeySize>;
using Signature = std::array<std::uint8_t, kSignatureSize>;
using PrivateKey = std::array<std::uint8_t, kPrivateKeySize>;
using Seed = std::array<std::uint8_t, kSeedSize>;

//! Deterministic key pair: the same seed always regenerates the same pair.
struct KeyPair {
    Seed seed{};
    PublicKey public_key{};
    PrivateKey private_key{};

    [[nodiscard]] static KeyPair from_seed(const Seed& seed);
    //! Seed = hash256(label). Handy for named scenario keys.
    [[nodiscard]] static KeyPair from_label(std::string_view label);
};

//! Ownership challenge a coin carries: hash256 of the 33-byte public key.
[[nodiscard]] Digest32 challenge_of(const PublicKey& public_key);

//! Throws ParamError when the private key is not kPrivateKeySize bytes.
[[nodiscard]] Signature sign(ByteSpan private_key, const Digest32& digest);

//! Returns false for malformed lengths, a nonzero padding byte, or a bad signature.
[[nodiscard]] bool verify(ByteSpan public_key, const Digest32& digest, ByteSpan signature);

}  // namespace dietnet
