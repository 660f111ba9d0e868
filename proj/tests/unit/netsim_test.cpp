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

#include <set>

#include <doctest.h>

#include "dietnet/errors.hpp"
#include "dietnet/netsim.hpp"
#include "test_chain.hpp"

using namespace dietnet;
using dietnet::testing::fast_params;

namespace {

const KeyPair kMiner = KeyPair::from_label("miner");
const KeyPair kUser = KeyPair::from_label("user");

DietConfig diet_config(const ChainParams& params, std::uint32_t l) {
    DietConfig cfg;
    cfg.pub_keys = {kUser.public_key};
    cfg.max_depth = 1000;
    cfg.max_length = l;
    cfg.chain = params;
    return cfg;
}

struct World {
    explicit World(std::uint64_t seed) : net{seed}, params{fast_params(2, 100000)},
                                         genesis{mine_genesis(params, kMiner.public_key, 1)} {
        for (const char* id : {"a", "b", "c"}) net.add_full_node(id, params, genesis);
        net.link("a", "b");
        net.link("b", "c");
        net.add_diet_node("d", diet_config(params, 6), genesis.header, "c");
    }

    void grow(int blocks) {
        for (int i = 0; i < blocks; ++i) {
            const char* id = i % 2 ? "a" : "c";
            net.mine(id, kMiner.public_key, params.min_target_bits);
            net.run_until_idle();
        }
    }

    void pay_user(std::uint64_t amount) {
        auto& node = net.full_node("a");
        auto coins = node.utxo().all_coins();
        node.submit_transaction(build_payment(coins, kMiner, PaymentRequest{challenge_of(kUser.public_key), amount, 0, 1}));
        net.mine("a", kMiner.public_key, params.min_target_bits);
        net.run_until_idle();
    }

    Network net;
    ChainParams params;
    Block genesis;
};

}  // namespace

TEST_CASE("rule names round trip") {
    for (auto kind : {RuleKind::kServeForgedChain, RuleKind::kReplaceShardBytes, RuleKind::kReplaceRoot,
                      RuleKind::kReplaceSibling}) {
        CHECK(rule_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_FALSE(rule_kind_from_string("nonsense").has_value());
}

TEST_CASE("an idle network has an empty trace") {
    Network net(5);
    CHECK(net.run_until_idle() == 0);
    CHECK(net.trace().empty());
    CHECK(net.trace_lines().empty());
}

TEST_CASE("relay reaches every linked node") {
    World w(3);
    w.grow(6);
    const auto tip = w.net.full_node("a").tip();
    CHECK(w.net.full_node("b").tip() == tip);
    CHECK(w.net.full_node("c").tip() == tip);
    CHECK(w.net.full_node("a").tip_height() == 6);
}

TEST_CASE("same seed, same trace") {
    auto run = [](std::uint64_t seed) {
        World w(seed);
        w.grow(3);
        w.pay_user(7);
        w.grow(2);
        w.net.update("d");
        return w.net.trace_lines();
    };
    CHECK(run(11) == run(11));
    CHECK_FALSE(run(11).empty());
}

TEST_CASE("verdicts do not depend on the seed") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        CAPTURE(seed);
        World w(seed);
        w.grow(2);
        w.pay_user(7);
        w.grow(2);
        auto v = w.net.update("d");
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == VerdictKind::kDietVerified);
    }
}

TEST_CASE("reply rewriting rules") {
    struct Case {
        RuleKind kind;
        RejectReason reason;
    };
    for (auto [kind, reason] : {Case{RuleKind::kReplaceShardBytes, RejectReason::kShardProofMismatch},
                                Case{RuleKind::kReplaceRoot, RejectReason::kShardProofMismatch},
                                Case{RuleKind::kReplaceSibling, RejectReason::kProofMismatch}}) {
        CAPTURE(to_string(kind));
        World w(2);
        w.grow(2);
        w.pay_user(7);
        w.grow(1);
        w.net.add_rule(AdversaryRule{kind, "d", ""});
        auto v = w.net.update("d");
        REQUIRE(v.size() == 1);
        CHECK(v[0].kind == VerdictKind::kRejected);
        CHECK(v[0].reason == reason);
        bool rewrote = false;
        for (const auto& rec : w.net.trace()) rewrote = rewrote || rec["event"] == "rewrite";
        CHECK(rewrote);
    }
}

TEST_CASE("a forged chain served to the victim") {
    World w(4);
    w.grow(3);
    auto& adv = w.net.add_adversary("x", w.params, w.genesis, 1);
    w.net.sync_from("x", "a", 3);
    CHECK(adv.tip() == w.net.full_node("a").tip());
    adv.forge_coins_next_block({Coin{OutPoint{hash256("fake"), 0}, 500, challenge_of(kUser.public_key)}});
    auto coins = adv.utxo().all_coins();
    adv.submit_transaction(build_payment(coins, kMiner, PaymentRequest{challenge_of(kUser.public_key), 5, 0, 1}));
    auto forged = w.net.mine("x", kMiner.public_key, 12);
    w.net.add_rule(AdversaryRule{RuleKind::kServeForgedChain, "d", "x"});
    auto v = w.net.update("d");
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == VerdictKind::kRejected);
    CHECK(v[0].reason == RejectReason::kRootMismatch);
    CHECK(v[0].reject_height == forged.header.height);
    // Honest nodes never heard of it.
    CHECK(w.net.full_node("a").tip_height() == 3);

    CHECK_THROWS_AS(w.net.mine("x", kMiner.public_key, 4), ConfigError);
}

TEST_CASE("configuration and delivery errors") {
    World w(1);
    CHECK_THROWS_AS(w.net.add_full_node("a", w.params, w.genesis), ConfigError);
    CHECK_THROWS_AS(w.net.link("a", "nobody"), ConfigError);
    CHECK_THROWS_AS(w.net.add_rule(AdversaryRule{RuleKind::kReplaceRoot, "a", ""}), ConfigError);

    w.net.send(SimMessage{MsgType::kBlockAnnounce, "a", "nobody", {}});
    CHECK(w.net.run_until_idle() == 1);
    CHECK(w.net.trace().back()["event"] == "error");

    w.net.send(SimMessage{MsgType::kBlockAnnounce, "a", "b", {1, 2, 3}});
    w.net.run_until_idle();
    CHECK(w.net.trace().back()["event"] == "error");

    w.net.add_diet_node("lost", diet_config(w.params, 6), w.genesis.header, "nobody");
    w.grow(1);
    // An unreachable peer yields no verdicts and an error in the trace.
    CHECK(w.net.update("lost").empty());
    CHECK(w.net.trace().back()["event"] == "error");
    CHECK(w.net.diet_node("lost").tip_height() == 0);
}

TEST_CASE("mined blocks never repeat a header hash") {
    World w(6);
    w.grow(12);
    w.pay_user(3);
    std::set<std::string> seen;
    std::size_t mined = 0;
    for (const auto& rec : w.net.trace()) {
        if (rec["event"] != "block" || rec["status"] != "mined") continue;
        ++mined;
        CHECK(seen.insert(rec["hash"].get<std::string>()).second);
    }
    CHECK(mined == 13);
}
