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

#include <random>

#include <doctest.h>

#include "dietnet/chain.hpp"
#include "dietnet/errors.hpp"
#include "dietnet/miner.hpp"

using namespace dietnet;

namespace {

// Second encoder, written against the field list rather than the library's Writer.
struct Oracle {
    Bytes out;

    void le(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    }
    void bytes(const std::uint8_t* p, std::size_t n) { out.insert(out.end(), p, p + n); }

    void tx(const Transaction& t) {
        le(t.version, 4);
        le(t.inputs.size(), 2);
        for (const auto& in : t.inputs) {
            bytes(in.prevout.txid.bytes.data(), 32);
            le(in.prevout.index, 4);
            bytes(in.public_key.data(), 33);
            bytes(in.signature.data(), 64);
        }
        le(t.outputs.size(), 2);
        for (const auto& o : t.outputs) {
            le(o.value, 8);
            out.push_back(static_cast<std::uint8_t>(o.kind));
            bytes(o.payload.bytes.data(), 32);
        }
    }
};

Transaction sample_tx() {
    auto alice = KeyPair::from_label("alice");
    Transaction tx;
    tx.inputs.push_back(TxInput{OutPoint{hash256("prev"), 3}, alice.public_key, {}});
    tx.inputs.back().signature.fill(0xAB);
    tx.outputs.push_back(TxOutput{7, OutputKind::kPayToPubkeyHash, hash256("bob")});
    tx.outputs.push_back(TxOutput{4, OutputKind::kPayToPubkeyHash, hash256("tux")});
    return tx;
}

Transaction sample_coinbase() {
    Transaction cb;
    cb.version = 9;
    cb.inputs.push_back(TxInput{OutPoint::coinbase_marker(), {}, {}});
    cb.outputs.push_back(TxOutput{50, OutputKind::kPayToPubkeyHash, hash256("miner")});
    cb.outputs.push_back(TxOutput{0, OutputKind::kCommitment, hash256("root")});
    return cb;
}

Block sample_block() {
    Block b;
    b.transactions = {sample_coinbase(), sample_tx()};
    b.header.prev_hash = hash256("parent");
    b.header.tx_mroot = tx_merkle_root(b.transactions);
    b.header.target_bits = 3;
    b.header.nonce = 0x0102030405060708ull;
    b.header.height = 9;
    return b;
}

}  // namespace

TEST_CASE("transaction codec") {
    auto tx = sample_tx();
    auto wire = encode(tx);
    CHECK(decode_transaction(wire) == tx);
    CHECK(wire.size() == 4 + 2 + (32 + 4 + 33 + 64) + 2 + 2 * (8 + 1 + 32));

    Oracle o;
    o.tx(tx);
    CHECK(wire == o.out);
    CHECK(txid(tx) == hash256(o.out));
}

TEST_CASE("header codec") {
    auto h = sample_block().header;
    auto wire = encode(h);
    CHECK(wire.size() == 77);
    CHECK(BlockHeader::kEncodedSize == 77);
    CHECK(decode_header(wire) == h);
    CHECK(wire[64] == 3);
    CHECK(wire[65] == 0x08);  // nonce, little-endian
    CHECK(wire[73] == 9);

    Bytes short_wire(wire.begin(), wire.end() - 1);
    CHECK_THROWS_AS((void)decode_header(short_wire), DecodeError);
    try {
        (void)decode_header(short_wire);
    } catch (const DecodeError& e) {
        CHECK(e.offset() == 73);
    }
}

TEST_CASE("block codec") {
    auto b = sample_block();
    auto wire = encode(b);
    CHECK(decode_block(wire) == b);

    SUBCASE("every truncation fails") {
        for (std::size_t n = 0; n < wire.size(); ++n) {
            CHECK_THROWS_AS((void)decode_block(ByteSpan{wire.data(), n}), DecodeError);
        }
    }
    SUBCASE("trailing byte fails") {
        auto longer = wire;
        longer.push_back(0);
        CHECK_THROWS_AS((void)decode_block(longer), DecodeError);
    }
    SUBCASE("bit flips either fail or re-encode to the same bytes") {
        for (std::size_t bit = 0; bit < wire.size() * 8; bit += 3) {
            auto flipped = wire;
            flipped[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            try {
                auto decoded = decode_block(flipped);
                CHECK(encode(decoded) == flipped);
            } catch (const DecodeError&) {
            }
        }
    }
    SUBCASE("empty lists and unknown kinds are rejected") {
        auto tx = sample_tx();
        tx.outputs.clear();
        CHECK_THROWS_AS((void)decode_transaction(encode(tx)), DecodeError);
        tx = sample_tx();
        tx.inputs.clear();
        CHECK_THROWS_AS((void)decode_transaction(encode(tx)), DecodeError);
        auto wire_tx = encode(sample_tx());
        wire_tx[4 + 2 + 133 + 2 + 8] = 2;  // first output kind
        CHECK_THROWS_AS((void)decode_transaction(wire_tx), DecodeError);
    }
}

TEST_CASE("txid") {
    auto a = sample_tx();
    auto b = sample_tx();
    CHECK(txid(a) == txid(b));
    b.outputs[0].value += 1;
    CHECK(txid(a) != txid(b));
}

TEST_CASE("sighash") {
    auto tx = sample_tx();
    auto base = sighash(tx);
    tx.inputs[0].signature.fill(0x11);
    CHECK(sighash(tx) == base);
    tx.inputs[0].public_key = KeyPair::from_label("carol").public_key;
    CHECK(sighash(tx) == base);
    tx.outputs[1].value = 5;
    CHECK(sighash(tx) != base);

    // A coinbase already carries zero proofs, so its sighash is hash256 of its own encoding.
    auto cb = sample_coinbase();
    Oracle o;
    o.tx(cb);
    CHECK(sighash(cb) == hash256(o.out));
}

TEST_CASE("coinbase marker and commitment") {
    auto cb = sample_coinbase();
    CHECK(cb.is_coinbase());
    CHECK_FALSE(sample_tx().is_coinbase());
    CHECK(cb.commitment() == hash256("root"));
    CHECK(sample_block().committed_utxo_root() == hash256("root"));
    CHECK_FALSE(sample_tx().commitment().has_value());
}

TEST_CASE("leading zero bits and pow predicate") {
    Digest32 d;
    CHECK(leading_zero_bits(d) == 256);
    d.bytes[0] = 0x0F;
    CHECK(leading_zero_bits(d) == 4);
    d.bytes[0] = 0x00;
    d.bytes[1] = 0x08;
    CHECK(leading_zero_bits(d) == 12);

    auto h = sample_block().header;
    h.target_bits = 0;
    CHECK(pow_ok(h));

    // The target is part of the hashed header, so search with it fixed at 5.
    h.target_bits = 5;
    h.nonce = 0;
    while (leading_zero_bits(header_hash(h)) != 4) ++h.nonce;
    CHECK((header_hash(h).bytes[0] & 0xF8) == 0x08);
    CHECK_FALSE(pow_ok(h));
    while (leading_zero_bits(header_hash(h)) < 5) ++h.nonce;
    CHECK(pow_ok(h));
}

TEST_CASE("block work") {
    CHECK(block_work(0) == 1);
    CHECK(block_work(8) == 256);
    CHECK(block_work(200) == (Work{1} << 200));
}

TEST_CASE("mean nonce search at 8 bits is near 256") {
    auto h = sample_block().header;
    h.target_bits = 8;
    std::uint64_t attempts = 0;
    const int runs = 200;
    for (int run = 0; run < runs; ++run) {
        h.height = static_cast<std::uint32_t>(run);
        const auto start = start_nonce(99, h.height);
        auto nonce = solve_pow(h, std::uint64_t{1} << 20, start);
        REQUIRE(nonce.has_value());
        attempts += *nonce - start + 1;
    }
    const double mean = static_cast<double>(attempts) / runs;
    CHECK(mean >= 128.0);
    CHECK(mean <= 512.0);
}
