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

#include "dietnet/chain.hpp"

#include <bit>

#include "dietnet/codec.hpp"
#include "dietnet/merkle.hpp"

namespace dietnet {

bool Transaction::is_coinbase() const {
    return inputs.size() == 1 && inputs.front().prevout.is_coinbase_marker();
}

std::optional<Digest32> Transaction::commitment() const {
    for (const auto& out : outputs) {
        if (out.kind == OutputKind::kCommitment) return out.payload;
    }
    return std::nullopt;
}

std::optional<Digest32> Block::committed_utxo_root() const {
    if (transactions.empty() || !transactions.front().is_coinbase()) return std::nullopt;
    return transactions.front().commitment();
}

void write(Writer& w, const Transaction& tx) {
    w.u32(tx.version);
    w.count16(tx.inputs.size(), "inputs");
    for (const auto& in : tx.inputs) {
        w.digest(in.prevout.txid);
        w.u32(in.prevout.index);
        w.raw(in.public_key);
        w.raw(in.signature);
    }
    w.count16(tx.outputs.size(), "outputs");
    for (const auto& out : tx.outputs) {
        w.u64(out.value);
        w.u8(static_cast<std::uint8_t>(out.kind));
        w.digest(out.payload);
    }
}

void write(Writer& w, const BlockHeader& header) {
    w.digest(header.prev_hash);
    w.digest(header.tx_mroot);
    w.u8(header.target_bits);
    w.u64(header.nonce);
    w.u32(header.height);
}

void write(Writer& w, const Block& block) {
    write(w, block.header);
    w.count16(block.transactions.size(), "transactions");
    for (const auto& tx : block.transactions) write(w, tx);
}

Transaction read_transaction(Reader& r) {
    Transaction tx;
    tx.version = r.u32();
    auto n_in = r.u16();
    if (n_in == 0) r.fail("transaction without inputs");
    tx.inputs.resize(n_in);
    for (auto& in : tx.inputs) {
        in.prevout.txid = r.digest();
        in.prevout.index = r.u32();
        in.public_key = r.fixed<kPublicKeySize>();
        in.signature = r.fixed<kSignatureSize>();
    }
    auto n_out = r.u16();
    if (n_out == 0) r.fail("transaction without outputs");
    tx.outputs.resize(n_out);
    for (auto& out : tx.outputs) {
        out.value = r.u64();
        auto kind = r.u8();
        if (kind > static_cast<std::uint8_t>(OutputKind::kCommitment)) {
            r.fail("unknown output kind " + std::to_string(kind));
        }
        out.kind = static_cast<OutputKind>(kind);
        out.payload = r.digest();
    }
    return tx;
}

BlockHeader read_header(Reader& r) {
    BlockHeader h;
    h.prev_hash = r.digest();
    h.tx_mroot = r.digest();
    h.target_bits = r.u8();
    h.nonce = r.u64();
    h.height = r.u32();
    return h;
}

Block read_block(Reader& r) {
    Block b;
    b.header = read_header(r);
    auto n = r.u16();
    if (n == 0) r.fail("block without transactions");
    b.transactions.reserve(n);
    for (std::uint16_t i = 0; i < n; ++i) b.transactions.push_back(read_transaction(r));
    return b;
}

namespace {

template <typename T>
Bytes encode_value(const T& v) {
    Writer w;
    write(w, v);
    return std::move(w).take();
}

template <typename F>
auto decode_all(ByteSpan data, F read) {
    Reader r(data);
    auto v = read(r);
    r.expect_end();
    return v;
}

}  // namespace

Bytes encode(const Transaction& tx) { return encode_value(tx); }
Bytes encode(const BlockHeader& header) { return encode_value(header); }
Bytes encode(const Block& block) { return encode_value(block); }

Transaction decode_transaction(ByteSpan data) {
    return decode_all(data, [](Reader& r) { return read_transaction(r); });
}
BlockHeader decode_header(ByteSpan data) {
    return decode_all(data, [](Reader& r) { return read_header(r); });
}
Block decode_block(ByteSpan data) {
    return decode_all(data, [](Reader& r) { return read_block(r); });
}

Digest32 txid(const Transaction& tx) { return hash256(encode(tx)); }

Digest32 sighash(const Transaction& tx) {
    Transaction stripped = tx;
    for (auto& in : stripped.inputs) {
        in.public_key.fill(0);
        in.signature.fill(0);
    }
    return hash256(encode(stripped));
}

Digest32 header_hash(const BlockHeader& header) { return hash256(encode(header)); }

unsigned leading_zero_bits(const Digest32& d) {
    unsigned n = 0;
    for (auto b : d.bytes) {
        if (b == 0) {
            n += 8;
            continue;
        }
        return n + static_cast<unsigned>(std::countl_zero(b));
    }
    return n;
}

bool pow_ok(const BlockHeader& header) { return leading_zero_bits(header_hash(header)) >= header.target_bits; }

Work block_work(std::uint8_t target_bits) { return Work{1} << target_bits; }

std::vector<Digest32> txids_of(const std::vector<Transaction>& txs) {
    std::vector<Digest32> ids;
    ids.reserve(txs.size());
    for (const auto& tx : txs) ids.push_back(txid(tx));
    return ids;
}

Digest32 tx_merkle_root(const std::vector<Transaction>& txs) { return build_root(txids_of(txs)); }

}  // namespace dietnet
