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

#include "dietnet/protocol.hpp"

#include "dietnet/codec.hpp"

namespace dietnet {

std::string_view to_string(MsgType type) {
    switch (type) {
        case MsgType::kQueryMerkleBlocks: return "queryMerkleBlocks";
        case MsgType::kMerkleBlocks: return "merkleBlocks";
        case MsgType::kQueryUtxoMRoot: return "queryUtxoMRoot";
        case MsgType::kUtxoMRoot: return "utxoMRoot";
        case MsgType::kQueryBlock: return "queryBlock";
        case MsgType::kBlock: return "block";
        case MsgType::kQueryUtxos: return "queryUtxos";
        case MsgType::kUtxos: return "utxos";
        case MsgType::kBlockAnnounce: return "blockAnnounce";
    }
    return "unknown";
}

bool is_known_msg_type(std::uint8_t code) {
    return (code >= 0x01 && code <= 0x08) || code == 0x10;
}

MsgType reply_type(MsgType query) {
    switch (query) {
        case MsgType::kQueryMerkleBlocks:
        case MsgType::kQueryUtxoMRoot:
        case MsgType::kQueryBlock:
        case MsgType::kQueryUtxos:
            return static_cast<MsgType>(static_cast<std::uint8_t>(query) + 1);
        default:
            throw ParamError("message type " + std::string(to_string(query)) + " is not a query");
    }
}

namespace {

Reader open_reply(ByteSpan data) {
    Reader r(data);
    auto status = r.u8();
    if (status != 0) {
        if (status > static_cast<std::uint8_t>(RejectReason::kQueryFailed)) r.fail("unknown reply status");
        throw QueryError(static_cast<RejectReason>(status));
    }
    return r;
}

}  // namespace

Bytes encode(const MerkleBlocksQuery& q) {
    Writer w;
    w.digest(q.since);
    w.raw(q.filter.encode());
    return std::move(w).take();
}

MerkleBlocksQuery decode_merkle_blocks_query(ByteSpan data) {
    Reader r(data);
    MerkleBlocksQuery q;
    q.since = r.digest();
    q.filter = BloomFilter::decode(data.subspan(r.offset()));
    return q;
}

Bytes encode_hash_query(const Digest32& block_hash) {
    Writer w;
    w.digest(block_hash);
    return std::move(w).take();
}

Digest32 decode_hash_query(ByteSpan data) {
    Reader r(data);
    auto d = r.digest();
    r.expect_end();
    return d;
}

Bytes encode_error_reply(RejectReason reason) {
    if (reason == RejectReason::kNone) throw ParamError("error reply needs a reason");
    return Bytes{static_cast<std::uint8_t>(reason)};
}

Bytes encode(const MerkleBlocksReply& reply) {
    Writer w;
    w.u8(0);
    w.count16(reply.headers.size(), "headers");
    for (const auto& h : reply.headers) write(w, h);
    w.count16(reply.matches.size(), "matches");
    for (const auto& m : reply.matches) {
        write(w, m.header);
        write(w, m.tx_tree);
        w.count16(m.txs.size(), "matched transactions");
        for (const auto& tx : m.txs) write(w, tx);
    }
    return std::move(w).take();
}

MerkleBlocksReply decode_merkle_blocks_reply(ByteSpan data) {
    auto r = open_reply(data);
    MerkleBlocksReply reply;
    auto n_headers = r.u16();
    reply.headers.reserve(n_headers);
    for (std::uint16_t i = 0; i < n_headers; ++i) reply.headers.push_back(read_header(r));
    auto n_matches = r.u16();
    for (std::uint16_t i = 0; i < n_matches; ++i) {
        MerkleBlockMatch m;
        m.header = read_header(r);
        m.tx_tree = read_partial_tree(r);
        auto n_txs = r.u16();
        for (std::uint16_t t = 0; t < n_txs; ++t) m.txs.push_back(read_transaction(r));
        reply.matches.push_back(std::move(m));
    }
    r.expect_end();
    return reply;
}

Bytes encode_root_reply(const Digest32& root) {
    Writer w;
    w.u8(0);
    w.digest(root);
    return std::move(w).take();
}

Digest32 decode_root_reply(ByteSpan data) {
    auto r = open_reply(data);
    auto root = r.digest();
    r.expect_end();
    return root;
}

Bytes encode_block_reply(const Block& block) {
    Writer w;
    w.u8(0);
    write(w, block);
    return std::move(w).take();
}

Block decode_block_reply(ByteSpan data) {
    auto r = open_reply(data);
    auto block = read_block(r);
    r.expect_end();
    return block;
}

Bytes encode(const UtxosReply& reply) {
    Writer w;
    w.u8(0);
    write(w, reply.utxo_tree);
    w.count16(reply.shards.size(), "shards");
    for (const auto& [index, shard] : reply.shards) {
        w.u32(index);
        write(w, shard);
    }
    write(w, reply.parent_coinbase);
    write(w, reply.parent_coinbase_proof);
    return std::move(w).take();
}

UtxosReply decode_utxos_reply(ByteSpan data) {
    auto r = open_reply(data);
    UtxosReply reply;
    reply.utxo_tree = read_partial_tree(r);
    auto n = r.u16();
    for (std::uint16_t i = 0; i < n; ++i) {
        auto index = r.u32();
        if (!reply.shards.emplace(index, read_shard(r)).second) r.fail("duplicate shard index");
    }
    reply.parent_coinbase = read_transaction(r);
    reply.parent_coinbase_proof = read_partial_tree(r);
    r.expect_end();
    return reply;
}

}  // namespace dietnet
