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
#include <map>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "dietnet/bloom.hpp"
#include "dietnet/chain.hpp"
#include "dietnet/errors.hpp"
#include "dietnet/merkle.hpp"
#include "dietnet/utxo_store.hpp"

namespace dietnet {

//! One-byte message tags. A reply's tag is its query's tag + 1.
enum class MsgType : std::uint8_t {
    kQueryMerkleBlocks = 0x01,
    kMerkleBlocks = 0x02,
    kQueryUtxoMRoot = 0x03,
    kUtxoMRoot = 0x04,
    kQueryBlock = 0x05,
    kBlock = 0x06,
    kQueryUtxos = 0x07,
    kUtxos = 0x08,
    kBlockAnnounce = 0x10,
};

[[nodiscard]] std::string_view to_string(MsgType type);
[[nodiscard]] bool is_known_msg_type(std::uint8_t code);
[[nodiscard]] MsgType reply_type(MsgType query);

//! A query the serving node could not answer; carried on the wire as a nonzero status byte.
class QueryError : public std::runtime_error {
  public:
    explicit QueryError(RejectReason reason, const std::string& what = {})
        : std::runtime_error(what.empty() ? std::string(to_string(reason)) : what), reason_{reason} {}

    [[nodiscard]] RejectReason reason() const noexcept { return reason_; }

  private:
    RejectReason reason_;
};

struct MerkleBlocksQuery {
    Digest32 since;
    BloomFilter filter{BloomFilter::kDefaultBits, BloomFilter::kDefaultHashes};
};

struct MerkleBlockMatch {
    BlockHeader header;
    PartialMerkleTree tx_tree;
    std::vector<Transaction> txs;
};

struct MerkleBlocksReply {
    std::vector<BlockHeader> headers;
    std::vector<MerkleBlockMatch> matches;
};

/**
 * Shards touched by a block, as they stood before it, with the partial UTXO tree over them.
 * The parent's coinbase rides along with its inclusion proof: its outputs enter the UTXO set
 * in this block, so the verifier must insert them before applying the block.
 */
struct UtxosReply {
    PartialMerkleTree utxo_tree;
    std::map<std::uint32_t, Shard> shards;
    Transaction parent_coinbase;
    PartialMerkleTree parent_coinbase_proof;
};

// Queries.
[[nodiscard]] Bytes encode(const MerkleBlocksQuery& q);
[[nodiscard]] MerkleBlocksQuery decode_merkle_blocks_query(ByteSpan data);
//! queryUtxoMRoot, queryBlock and queryUtxos all carry a single block hash.
[[nodiscard]] Bytes encode_hash_query(const Digest32& block_hash);
[[nodiscard]] Digest32 decode_hash_query(ByteSpan data);

// Replies: u8 status (0 = ok, else a RejectReason code) followed by the payload when ok.
// Decoders throw QueryError for a nonzero status and DecodeError for malformed bytes.
[[nodiscard]] Bytes encode_error_reply(RejectReason reason);
[[nodiscard]] Bytes encode(const MerkleBlocksReply& reply);
[[nodiscard]] MerkleBlocksReply decode_merkle_blocks_reply(ByteSpan data);
[[nodiscard]] Bytes encode_root_reply(const Digest32& root);
[[nodiscard]] Digest32 decode_root_reply(ByteSpan data);
[[nodiscard]] Bytes encode_block_reply(const Block& block);
[[nodiscard]] Block decode_block_reply(ByteSpan data);
[[nodiscard]] Bytes encode(const UtxosReply& reply);
[[nodiscard]] UtxosReply decode_utxos_reply(ByteSpan data);

}  // namespace dietnet
