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

#include <functional>

#include <doctest.h>

#include "dietnet/diet_node.hpp"
#include "dietnet/errors.hpp"
#include "test_chain.hpp"

using namespace dietnet;
using dietnet::testing::TestChain;

namespace {

DietConfig config_for(const TestChain& c, const KeyPair& user, std::uint32_t max_length, bool diet = true) {
    DietConfig cfg;
    cfg.pub_keys = {user.public_key};
    cfg.max_depth = 1000;
    cfg.max_length = max_length;
    cfg.diet_enabled = diet;
    cfg.chain = c.params;
    return cfg;
}

//! Forwards to a node and lets the test rewrite replies.
class TamperingTransport final : public Transport {
  public:
    using Rewrite = std::function<Bytes(MsgType, const Bytes&)>;
    TamperingTransport(const FullNode& node, Rewrite rewrite) : node_{node}, rewrite_{std::move(rewrite)} {}
    Bytes request(MsgType type, const Bytes& payload) override {
        return rewrite_(type, node_.handle_query(type, payload));
    }

  private:
    const FullNode& node_;
    Rewrite rewrite_;
};

Block mine_on(const FullNode& node, const KeyPair& key, std::vector<Transaction> txs, std::uint64_t seed) {
    auto tmpl = make_template(node, txs, key.public_key, node.params().min_target_bits);
    return mine_block(tmpl, node, seed);
}

}  // namespace

TEST_CASE("verification range arithmetic") {
    auto r = compute_verification_range(10, 20, 6, 3, 18);
    REQUIRE(r.has_value());
    CHECK(r->first == 15);
    CHECK(r->last == 18);
    // Too deep under the tip: trusted, nothing to verify.
    CHECK_FALSE(compute_verification_range(0, 20, 6, 3, 14).has_value());
    CHECK_FALSE(compute_verification_range(18, 20, 6, 3, 18).has_value());
    // Short chains never go negative.
    CHECK(compute_verification_range(0, 2, 6, 6, 2) == VerificationRange{0, 2});
    CHECK_FALSE(compute_verification_range(0, 2, 6, 0, 2).has_value());
}

TEST_CASE("verify_headers") {
    TestChain c;
    auto user = KeyPair::from_label("user");
    for (int i = 0; i < 5; ++i) c.mine();
    std::vector<BlockHeader> headers;
    for (std::uint32_t h = 1; h <= 5; ++h) headers.push_back(c.node.block_at(h).header);

    SUBCASE("honest extension") {
        DietNode diet(config_for(c, user, 3), c.genesis.header);
        CHECK(diet.verify_headers(headers) == c.node.tip());
        CHECK(diet.tip_height() == 5);
        CHECK(diet.last_header_reject() == RejectReason::kNone);
    }
    SUBCASE("bad proof of work mid-list keeps the prefix") {
        DietNode diet(config_for(c, user, 3), c.genesis.header);
        auto broken = headers;
        while (pow_ok(broken[2])) ++broken[2].nonce;
        diet.verify_headers(broken);
        CHECK(diet.tip_height() == 2);
        CHECK(diet.last_header_reject() == RejectReason::kPowFailure);
    }
    SUBCASE("heavier branch wins") {
        DietNode diet(config_for(c, user, 3), c.genesis.header);
        diet.verify_headers(headers);
        FullNode side(c.params, c.genesis);
        auto tmpl = make_template(side, {}, user.public_key, 9);
        auto heavy = mine_block(tmpl, side, 1);
        diet.verify_headers({heavy.header});
        CHECK(diet.tip() == header_hash(heavy.header));
        CHECK(diet.tip_height() == 1);
    }
}

TEST_CASE("honest chain verdicts") {
    TestChain c;
    auto user = KeyPair::from_label("user");
    for (int i = 0; i < 4; ++i) c.mine();
    auto pay = c.pay(c.miner, user, 9);
    c.mine({pay});
    for (int i = 0; i < 5; ++i) c.mine();

    SUBCASE("spv only") {
        DietNode spv(config_for(c, user, 6, false), c.genesis.header);
        DirectTransport peer(c.node);
        auto v = spv.update_chain(peer);
        REQUIRE(v.size() == 1);
        CHECK(v[0].txid == txid(pay));
        CHECK(v[0].kind == VerdictKind::kSpvOnly);
        CHECK(spv.bandwidth().down.count(MsgType::kUtxos) == 0);
    }
    SUBCASE("diet verified") {
        DietNode diet(config_for(c, user, 6), c.genesis.header);
        DirectTransport peer(c.node);
        auto v = diet.update_chain(peer);
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == VerdictKind::kDietVerified);
        CHECK(v[0].range == VerificationRange{0, 5});
        CHECK(diet.highest_verified() == 5);
        CHECK(diet.block_costs().size() == 5);

        // Later blocks are checked from where the last round stopped.
        auto pay2 = c.pay(c.miner, user, 4);
        c.mine({pay2});
        auto v2 = diet.update_chain(peer);
        REQUIRE(v2.size() == 1);
        CHECK(v2[0].kind == VerdictKind::kDietVerified);
        CHECK(v2[0].range == VerificationRange{5, 11});
        CHECK(diet.highest_verified() == 11);
    }
    SUBCASE("verify every block of the chain") {
        DietNode diet(config_for(c, user, 100), c.genesis.header);
        DirectTransport peer(c.node);
        diet.update_chain(peer);
        auto out = diet.verify_blocks_up_to(peer, c.node.tip_height());
        CHECK(out.status == VerifyOutcome::Status::kVerified);
        CHECK(diet.highest_verified() == 10);
        auto again = diet.verify_blocks_up_to(peer, c.node.tip_height());
        CHECK(again.status == VerifyOutcome::Status::kFallback);
    }
}

TEST_CASE("bandwidth counters match the bytes exchanged") {
    TestChain c(dietnet::testing::fast_params(3, 100000));
    auto user = KeyPair::from_label("user");
    c.mine();
    c.mine({c.pay(c.miner, user, 9)});
    DietNode diet(config_for(c, user, 6), c.genesis.header);
    std::uint64_t seen = 0;
    TamperingTransport peer(c.node, [&](MsgType, const Bytes& reply) {
        seen += reply.size();
        return reply;
    });
    diet.update_chain(peer);
    CHECK(diet.bandwidth().total_down() == seen);
    std::uint64_t per_block = 0;
    for (const auto& cost : diet.block_costs()) per_block += cost.utxos_bytes;
    CHECK(per_block == diet.bandwidth().down.at(MsgType::kUtxos));
}

TEST_CASE("false positives are skipped and broken proofs rejected") {
    TestChain c;
    auto user = KeyPair::from_label("user");
    c.mine();
    auto pay = c.pay(c.miner, user, 9);
    auto paid = c.mine({pay});
    const auto h = paid.header.height;

    SUBCASE("an extra transaction that does not concern the user") {
        TamperingTransport peer(c.node, [&](MsgType type, const Bytes& reply) {
            if (type != MsgType::kQueryMerkleBlocks) return reply;
            auto r = decode_merkle_blocks_reply(reply);
            for (auto& m : r.matches) {
                m.tx_tree = extract_partial(txids_of(paid.transactions), {0, 1});
                m.txs.insert(m.txs.begin(), paid.transactions.front());
            }
            return encode(r);
        });
        DietNode diet(config_for(c, user, 6, false), c.genesis.header);
        auto v = diet.update_chain(peer);
        REQUIRE(v.size() == 1);
        CHECK(v[0].txid == txid(pay));
    }
    SUBCASE("corrupted partial tree") {
        TamperingTransport peer(c.node, [&](MsgType type, const Bytes& reply) {
            if (type != MsgType::kQueryMerkleBlocks) return reply;
            auto r = decode_merkle_blocks_reply(reply);
            for (auto& m : r.matches) m.tx_tree.siblings.begin()->second.bytes[5] ^= 1;
            return encode(r);
        });
        DietNode diet(config_for(c, user, 6), c.genesis.header);
        auto v = diet.update_chain(peer);
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == VerdictKind::kRejected);
        CHECK(v[0].reason == RejectReason::kProofMismatch);
        CHECK(v[0].reject_height == h);
    }
}

TEST_CASE("tampered shard bytes") {
    TestChain c(dietnet::testing::fast_params(2, 100000));
    auto user = KeyPair::from_label("user");
    c.mine();
    c.mine({c.pay(c.miner, user, 9)});
    TamperingTransport peer(c.node, [&](MsgType type, const Bytes& reply) {
        if (type != MsgType::kQueryUtxos) return reply;
        auto r = decode_utxos_reply(reply);
        for (auto& [i, s] : r.shards) {
            if (!s.coins.empty()) {
                s.coins.front().value += 1000;
                r.utxo_tree.included[i] = s.leaf_hash();
                break;
            }
        }
        return encode(r);
    });
    DietNode diet(config_for(c, user, 6), c.genesis.header);
    auto v = diet.update_chain(peer);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == VerdictKind::kRejected);
    CHECK(v[0].reason == RejectReason::kShardProofMismatch);
    CHECK(diet.highest_verified() == v[0].reject_height - 1);
}

TEST_CASE("double spend: accepted by SPV, rejected by diet") {
    TestChain c;
    auto user = KeyPair::from_label("user");
    auto mallory = KeyPair::from_label("mallory");
    c.mine();
    c.mine();
    auto first = c.pay(c.miner, mallory, 30);
    c.mine({first});
    c.mine();

    FullNode forger(c.params, c.genesis);
    for (std::uint32_t h = 1; h <= c.node.tip_height(); ++h) REQUIRE(forger.connect_block(c.node.block_at(h)).accepted());
    forger.set_skip_tx_validation(true);
    // Respend the coin `first` already consumed, this time to the user.
    Transaction again = first;
    again.outputs.resize(1);
    again.outputs[0] = TxOutput{30, OutputKind::kPayToPubkeyHash, challenge_of(user.public_key)};
    sign_all_inputs(again, c.miner);
    CHECK(validate_transaction(again, c.node.view()).reason == RejectReason::kMissingInput);
    auto bad = mine_on(forger, c.miner, {again}, 3);
    REQUIRE(forger.connect_block(bad).accepted());
    CHECK(c.node.connect_block(bad).reason == RejectReason::kMissingInput);

    DirectTransport peer(forger);
    DietNode spv(config_for(c, user, 6, false), c.genesis.header);
    auto sv = spv.update_chain(peer);
    REQUIRE(sv.size() == 1);
    CHECK(sv[0].kind == VerdictKind::kSpvOnly);

    DietNode diet(config_for(c, user, 6), c.genesis.header);
    auto dv = diet.update_chain(peer);
    REQUIRE(dv.size() == 1);
    CHECK(dv[0].kind == VerdictKind::kRejected);
    CHECK(dv[0].reason == RejectReason::kMissingInput);
    CHECK(dv[0].reject_height == bad.header.height);
    CHECK(diet.highest_verified() == bad.header.height - 1);
}

TEST_CASE("a single forged block is caught by its own verification") {
    TestChain c;
    auto user = KeyPair::from_label("user");
    for (int i = 0; i < 3; ++i) c.mine();

    FullNode forger(c.params, c.genesis);
    for (std::uint32_t h = 1; h <= c.node.tip_height(); ++h) REQUIRE(forger.connect_block(c.node.block_at(h)).accepted());
    forger.forge_coins_next_block({Coin{OutPoint{hash256("fake"), 0}, 1000, challenge_of(user.public_key)}});
    auto coins = forger.utxo().all_coins();
    auto pay = build_payment(coins, c.miner, PaymentRequest{challenge_of(user.public_key), 5, 0, 1});
    auto forged = mine_on(forger, c.miner, {pay}, 9);
    REQUIRE(forger.connect_block(forged).accepted());
    CHECK(c.node.connect_block(forged).reason == RejectReason::kUtxoRootMismatch);

    for (std::uint32_t l : {1u, 2u, 4u}) {
        CAPTURE(l);
        DirectTransport peer(forger);
        DietNode diet(config_for(c, user, l), c.genesis.header);
        auto v = diet.update_chain(peer);
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == VerdictKind::kRejected);
        CHECK(v[0].reason == RejectReason::kRootMismatch);
        CHECK(v[0].reject_height == forged.header.height);
    }
}

TEST_CASE("reorg below the verified height resets it") {
    TestChain c;
    auto user = KeyPair::from_label("user");
    c.mine();
    c.mine({c.pay(c.miner, user, 9)});
    c.mine();
    DietNode diet(config_for(c, user, 6), c.genesis.header);
    DirectTransport peer(c.node);
    diet.update_chain(peer);
    CHECK(diet.highest_verified() == 2);

    FullNode side(c.params, c.genesis);
    REQUIRE(side.connect_block(c.node.block_at(1)).accepted());
    auto heavy = make_template(side, {}, c.miner.public_key, 10);
    auto block = mine_block(heavy, side, 4);
    diet.verify_headers({block.header});
    CHECK(diet.tip() == header_hash(block.header));
    CHECK(diet.highest_verified() == 1);
}
