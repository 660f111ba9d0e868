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

#include "dietnet/crypto.hpp"

#include <openssl/evp.h>
#include <sodium.h>

#include <stdexcept>

#include "dietnet/errors.hpp"

namespace dietnet {

namespace {

void sha256(const std::uint8_t* data, std::size_t size, std::uint8_t* out) {
    unsigned int len = 0;
    if (EVP_Digest(data, size, out, &len, EVP_sha256(), nullptr) != 1 || len != 32) {
        throw std::runtime_error("EVP_Digest(sha256) failed");
    }
}

void ensure_sodium() {
    static const bool ready = [] { return sodium_init() >= 0; }();
    if (!ready) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

Digest32 hash256(ByteSpan data) {
    std::array<std::uint8_t, 32> first{};
    sha256(data.data(), data.size(), first.data());
    Digest32 out;
    sha256(first.data(), first.size(), out.bytes.data());
    return out;
}

Digest32 hash256(std::string_view text) {
    return hash256(ByteSpan{reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

KeyPair KeyPair::from_seed(const Seed& seed) {
    ensure_sodium();
    static_assert(crypto_sign_SEEDBYTES == kSeedSize);
    static_assert(crypto_sign_SECRETKEYBYTES == kPrivateKeySize);
    static_assert(crypto_sign_PUBLICKEYBYTES + 1 == kPublicKeySize);
    KeyPair kp;
    kp.seed = seed;
    crypto_sign_seed_keypair(kp.public_key.data(), kp.private_key.data(), seed.data());
    kp.public_key[kPublicKeySize - 1] = 0;
    return kp;
}

KeyPair KeyPair::from_label(std::string_view label) { return from_seed(hash256(label).bytes); }

Digest32 challenge_of(const PublicKey& public_key) { return hash256(ByteSpan{public_key}); }

Signature sign(ByteSpan private_key, const Digest32& digest) {
    if (private_key.size() != kPrivateKeySize) throw ParamError("private key must be 64 bytes");
    ensure_sodium();
    Signature sig{};
    crypto_sign_detached(sig.data(), nullptr, digest.bytes.data(), digest.bytes.size(), private_key.data());
    return sig;
}

bool verify(ByteSpan public_key, const Digest32& digest, ByteSpan signature) {
    if (public_key.size() != kPublicKeySize || signature.size() != kSignatureSize) return false;
    if (public_key[kPublicKeySize - 1] != 0) return false;
    ensure_sodium();
    return crypto_sign_verify_detached(signature.data(), digest.bytes.data(), digest.bytes.size(),
                                       public_key.data()) == 0;
}

}  // namespace dietnet
