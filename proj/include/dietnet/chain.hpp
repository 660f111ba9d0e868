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

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dietnet/bytes.hpp"
#include "dietnet/crypto.hpp"

namespace dietnet {

class Reader;
class Writer;

struct OutPoint {
    Digest32 txid;
    std::uint32_t index{0};

    static constexpr std::uint32_t kCoinbaseIndex = 0xFFFFFFFF;

    [[nodiscard]] static OutPoint coinbase_marker() { return {Digest32{}, kCoinbaseIndex}; }
    [[nodiscard]] bool is_coinbase_marker() const { return index == kCoinbaseIndex && txid.is_zero(); }

    friend auto operator<=>(const OutPoint&, const OutPoint&) = default;
};

struct TxInput {
    OutPoint prevout;
    PublicKey public_key{};
    Signature signature{};

    friend bool operator==(const TxInput&, const TxInput&) = default;
};

enum class OutputKind : std::uint8_t {
    kPayToPubkeyHash = 0x00,
    kCommitment = 0x01,  // unspendable; payload is a UTXO Merkle root
};

struct TxOutput {
    std::uint64_t value{0};
    OutputKind kind{OutputKind::kPayToPubkeyHash};
    Digest32 payload;

    friend bool operator==(const TxOutput&, const TxOutput&) = default;
};

struct Transaction {
    std::uint32_t version{1};
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;

    //! Exactly one input carrying the coinbase marker.
    [[nodiscard]] bool is_coinbase() const;
    //! Payload of the first commitment output, if any.
    [[nodiscard]] std::optional<Digest32> commitment() const;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct BlockHeader {
    Digest32 prev_hash;
    Digest32 tx_mroot;
    std::uint8_t target_bits{0};
    std::uint64_t nonce{0};
    std::uint32_t height{0};

    static constexpr std::size_t kEncodedSize = 32 + 32 + 1 + 8 + 4;

    friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;

    //! UTXO root carried by the coinbase, if the block has one.
    [[nodiscard]] std::optional<Digest32> committed_utxo_root() const;

    friend bool operator==(const Block&, const Block&) = default;
};

// Canonical little-endian encodings; list lengths are u16 counts.
[[nodiscard]] Bytes encode(const Transaction& tx);
[[nodiscard]] Bytes encode(const BlockHeader& header);
[[nodiscard]] Bytes encode(const Block& block);

void write(Writer& w, const Transaction& tx);
void write(Writer& w, const BlockHeader& header);
void write(Writer& w, const Block& block);
[[nodiscard]] Transaction read_transaction(Reader& r);
[[nodiscard]] BlockHeader read_header(Reader& r);
[[nodiscard]] Block read_block(Reader& r);

//! Decoders throw DecodeError (with the byte offset) on truncated, over-long or invalid input.
[[nodiscard]] Transaction decode_transaction(ByteSpan data);
[[nodiscard]] BlockHeader decode_header(ByteSpan data);
[[nodiscard]] Block decode_block(ByteSpan data);

[[nodiscard]] Digest32 txid(const Transaction& tx);
//! hash256 of the encoding with every input's public key and signature zeroed.
[[nodiscard]] Digest32 sighash(const Transaction& tx);
[[nodiscard]] Digest32 header_hash(const BlockHeader& header);

[[nodiscard]] unsigned leading_zero_bits(const Digest32& d);
//! header_hash(h) has at least h.target_bits leading zero bits.
[[nodiscard]] bool pow_ok(const BlockHeader& header);

using Work = boost::multiprecision::cpp_int;
//! Expected hashes to find a block at this difficulty: 2^target_bits.
[[nodiscard]] Work block_work(std::uint8_t target_bits);

//! Transaction Merkle root over the txids, in block order.
[[nodiscard]] Digest32 tx_merkle_root(const std::vector<Transaction>& txs);
[[nodiscard]] std::vector<Digest32> txids_of(const std::vector<Transaction>& txs);

}  // namespace dietnet
