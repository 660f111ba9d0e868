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

#include "dietnet/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "dietnet/errors.hpp"
#include "dietnet/miner.hpp"
#include "dietnet/netsim.hpp"
#include "dietnet/wallet.hpp"

namespace dietnet {

using nlohmann::json;

namespace {

// A config object plus the path it was found at, so every error can name its field.
class Cfg {
  public:
    Cfg(const json& node, std::string path) : j_{&node}, path_{std::move(path)} {
        if (!j_->is_object()) throw ConfigError(path_, "expected an object");
    }

    [[nodiscard]] const std::string& path() const { return path_; }
    [[nodiscard]] std::string path(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }
    [[nodiscard]] bool has(std::string_view key) const { return j_->contains(key); }

    [[nodiscard]] const json& raw(std::string_view key) const {
        auto it = j_->find(key);
        if (it == j_->end()) throw ConfigError(path(key), "missing required field");
        return *it;
    }

    [[nodiscard]] std::string str(std::string_view key) const {
        const auto& v = raw(key);
        if (!v.is_string()) throw ConfigError(path(key), "expected a string");
        return v.get<std::string>();
    }
    [[nodiscard]] std::string str(std::string_view key, std::string fallback) const {
        return has(key) ? str(key) : fallback;
    }

    [[nodiscard]] std::uint64_t uint(std::string_view key) const {
        const auto& v = raw(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            throw ConfigError(path(key), "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }
    [[nodiscard]] std::uint64_t uint(std::string_view key, std::uint64_t fallback) const {
        return has(key) ? uint(key) : fallback;
    }
    [[nodiscard]] std::uint64_t uint_max(std::string_view key, std::uint64_t fallback, std::uint64_t max) const {
        auto v = uint(key, fallback);
        if (v > max) throw ConfigError(path(key), "must be at most " + std::to_string(max));
        return v;
    }

    [[nodiscard]] double number(std::string_view key) const {
        const auto& v = raw(key);
        if (!v.is_number()) throw ConfigError(path(key), "expected a number");
        return v.get<double>();
    }

    [[nodiscard]] std::vector<Cfg> objects(std::string_view key) const {
        const auto& v = raw(key);
        if (!v.is_array()) throw ConfigError(path(key), "expected a list");
        std::vector<Cfg> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.emplace_back(v[i], path(key) + "[" + std::to_string(i) + "]");
        return out;
    }

    [[nodiscard]] std::vector<std::string> strings(std::string_view key) const {
        const auto& v = raw(key);
        if (!v.is_array()) throw ConfigError(path(key), "expected a list of strings");
        std::vector<std::string> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_string()) throw ConfigError(path(key) + "[" + std::to_string(i) + "]", "expected a string");
            out.push_back(v[i].get<std::string>());
        }
        return out;
    }

  private:
    const json* j_;
    std::string path_;
};

std::uint64_t ceil_div_ok(std::uint64_t total, unsigned k, std::uint64_t cap) {
    // total / 2^k <= cap, without the multiplication
    const auto q = total >> k;
    const auto rem = total & ((std::uint64_t{1} << k) - 1);
    return q < cap || (q == cap && rem == 0);
}

std::uint64_t serialized_set_size(std::span<const Coin> coins, unsigned k) {
    std::uint64_t total = 0;
    for (const auto& shard : partition(coins, k)) total += shard.encode().size();
    return total;
}

class Runner {
  public:
    Runner(const json& config, const ScenarioOptions& options) : root_{config, ""}, net_{0} {
        name_ = root_.str("name");
        seed_ = options.seed ? *options.seed : root_.uint("seed");
        net_ = Network(seed_);
        rng_.seed(seed_);
        if (root_.uint("target_bits") > 255) throw ConfigError("target_bits", "must be at most 255");
        bits_ = static_cast<std::uint8_t>(root_.uint("target_bits"));
        params_.min_target_bits = bits_;
        params_.subsidy = root_.uint("subsidy", params_.subsidy);
        params_.sharding.k = static_cast<unsigned>(root_.uint_max("initial_k", 0, 20));
        params_.sharding.size_cap = root_.uint("shard_size_cap", 1024);
        if (params_.sharding.size_cap == 0) throw ConfigError("shard_size_cap", "must be positive");

        for (const auto& label : root_.strings("keys")) keys_.emplace(label, KeyPair::from_label(label));
        if (keys_.empty()) throw ConfigError("keys", "at least one key is needed");
        default_key_ = root_.strings("keys").front();
        const auto& gkey = key(root_, "genesis_key", default_key_);
        genesis_ = mine_genesis(params_, gkey.public_key, seed_);
        build_nodes();
    }

    ScenarioReport run() {
        if (root_.has("script")) {
            for (const auto& action : root_.objects("script")) {
                exec(action);
                net_.run_until_idle();
            }
        }
        ScenarioReport report;
        report.name = name_;
        report.seed = seed_;
        if (root_.has("expect")) {
            auto list = root_.objects("expect");
            for (std::size_t i = 0; i < list.size(); ++i) report.expectations.push_back(check(list[i], i));
        }
        report.trace = net_.trace_lines();
        report.json = summary(report);
        return report;
    }

  private:
    const KeyPair& key(const Cfg& c, std::string_view field, const std::string& fallback = {}) const {
        auto label = fallback.empty() ? c.str(field) : c.str(field, fallback);
        auto it = keys_.find(label);
        if (it == keys_.end()) throw ConfigError(c.path(field), "unknown key '" + label + "'");
        return it->second;
    }

    std::string full_id(const Cfg& c, std::string_view field) const {
        auto id = c.str(field);
        if (!net_.has_full_node(id)) throw ConfigError(c.path(field), "unknown full node '" + id + "'");
        return id;
    }
    std::string adversary_id(const Cfg& c, std::string_view field) const {
        auto id = full_id(c, field);
        if (!net_.is_adversary(id)) throw ConfigError(c.path(field), "'" + id + "' is not an adversary");
        return id;
    }
    std::string diet_id(const Cfg& c, std::string_view field) const {
        auto id = c.str(field);
        if (!net_.has_diet_node(id)) throw ConfigError(c.path(field), "unknown diet or spv node '" + id + "'");
        return id;
    }

    void build_nodes() {
        auto nodes = root_.objects("nodes");
        std::vector<std::pair<std::size_t, Cfg>> light;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& n = nodes[i];
            auto id = n.str("id");
            auto role = n.str("role");
            if (net_.has_full_node(id) || net_.has_diet_node(id)) throw ConfigError(n.path("id"), "duplicate node id");
            if (role == "full" || role == "legacy") {
                auto p = params_;
                p.check_utxo_commitment = role == "full";
                net_.add_full_node(id, p, genesis_);
            } else if (role == "adversary") {
                net_.add_adversary(id, params_, genesis_, static_cast<std::uint32_t>(n.uint_max("mining_budget", 0, 1u << 20)));
            } else if (role == "diet" || role == "spv") {
                light.emplace_back(i, n);
                roles_[id] = role;
                continue;
            } else {
                throw ConfigError(n.path("role"), "unknown role '" + role + "' (full, legacy, adversary, diet, spv)");
            }
            roles_[id] = role;
            reward_[id] = key(n, "reward_key", default_key_).public_key;
        }
        std::set<std::pair<std::string, std::string>> linked;
        for (const auto& n : nodes) {
            if (!n.has("peers")) continue;
            auto id = n.str("id");
            auto peers = n.strings("peers");
            for (std::size_t j = 0; j < peers.size(); ++j) {
                const auto at = n.path("peers") + "[" + std::to_string(j) + "]";
                if (!net_.has_full_node(id) || !net_.has_full_node(peers[j])) {
                    throw ConfigError(at, "links join two full nodes");
                }
                if (net_.is_adversary(id) || net_.is_adversary(peers[j])) {
                    throw ConfigError(at, "adversaries do not relay to honest nodes");
                }
                auto key = std::minmax(id, peers[j]);
                if (key.first == key.second) throw ConfigError(at, "a node cannot link to itself");
                if (linked.emplace(key.first, key.second).second) net_.link(id, peers[j]);
            }
        }
        for (const auto& [i, n] : light) {
            DietConfig cfg;
            for (const auto& label : n.strings("keys")) {
                auto it = keys_.find(label);
                if (it == keys_.end()) throw ConfigError(n.path("keys"), "unknown key '" + label + "'");
                cfg.pub_keys.push_back(it->second.public_key);
            }
            cfg.max_depth = static_cast<std::uint32_t>(n.uint_max("max_depth", 6, 1u << 30));
            cfg.max_length = static_cast<std::uint32_t>(n.uint_max("max_length", 6, 1u << 30));
            cfg.diet_enabled = n.str("role") == "diet";
            cfg.chain = params_;
            auto peer = full_id(n, "peer");
            net_.add_diet_node(n.str("id"), std::move(cfg), genesis_.header, peer);
        }
    }

    // The node's coins minus those its mempool already spends.
    static std::vector<Coin> spendable(const FullNode& node) {
        std::set<OutPoint> spent;
        for (const auto& tx : node.mempool()) {
            for (const auto& in : tx.inputs) spent.insert(in.prevout);
        }
        auto coins = node.utxo().all_coins();
        std::erase_if(coins, [&](const Coin& c) { return spent.contains(c.outpoint); });
        return coins;
    }

    void name_tx(const Cfg& a, const Transaction& tx) {
        if (!a.has("id")) return;
        auto id = a.str("id");
        if (named_.contains(id)) throw ConfigError(a.path("id"), "duplicate transaction id '" + id + "'");
        named_.emplace(id, tx);
        names_[txid(tx)] = id;
    }

    Transaction payment(const Cfg& a, const FullNode& node, const KeyPair& from, const KeyPair& to) {
        PaymentRequest req{challenge_of(to.public_key), a.uint("amount"), a.uint("fee", 0),
                           static_cast<std::uint32_t>(a.uint_max("pieces", 1, 1000))};
        try {
            return build_payment(spendable(node), from, req);
        } catch (const ParamError& e) {
            throw ConfigError(a.path("amount"), e.what());
        }
    }

    void mine(const Cfg& a, const NodeId& node, const PublicKey& reward) {
        try {
            net_.mine(node, reward, bits_);
        } catch (const ConfigError& e) {
            throw ConfigError(a.path(), e.what());
        }
        net_.run_until_idle();
    }

    PublicKey reward_of(const Cfg& a, const NodeId& node) const {
        return a.has("reward") ? key(a, "reward").public_key : reward_.at(node);
    }

    void exec(const Cfg& a) {
        const auto action = a.str("action");
        if (action == "mine") {
            auto node = full_id(a, "node");
            const auto reward = reward_of(a, node);
            for (std::uint64_t i = a.uint("count", 1); i > 0; --i) mine(a, node, reward);
        } else if (action == "pay") {
            auto node_id = full_id(a, "node");
            auto& node = net_.full_node(node_id);
            const auto& from = key(a, "from");
            const auto& to = key(a, "to");
            Transaction tx;
            if (a.has("respend")) {
                // Send coins an earlier transaction already spent; only a forging node mines this.
                if (!net_.is_adversary(node_id)) throw ConfigError(a.path("respend"), "only adversaries respend");
                auto it = named_.find(a.str("respend"));
                if (it == named_.end()) throw ConfigError(a.path("respend"), "unknown transaction id");
                tx = it->second;
                tx.outputs = {TxOutput{a.uint("amount"), OutputKind::kPayToPubkeyHash, challenge_of(to.public_key)}};
                sign_all_inputs(tx, from);
                node.set_skip_tx_validation(true);
            } else {
                tx = payment(a, node, from, to);
            }
            name_tx(a, tx);
            node.submit_transaction(std::move(tx));
        } else if (action == "traffic") {
            auto node_id = full_id(a, "node");
            std::vector<KeyPair> wallets;
            for (const auto& label : a.strings("wallets")) {
                auto it = keys_.find(label);
                if (it == keys_.end()) throw ConfigError(a.path("wallets"), "unknown key '" + label + "'");
                wallets.push_back(it->second);
            }
            if (wallets.empty()) throw ConfigError(a.path("wallets"), "at least one wallet is needed");
            std::vector<NodeId> updates;
            if (a.has("update")) {
                for (const auto& id : a.strings("update")) {
                    if (!net_.has_diet_node(id)) throw ConfigError(a.path("update"), "unknown diet or spv node '" + id + "'");
                    updates.push_back(id);
                }
            }
            const auto reward = reward_of(a, node_id);
            const auto payments = static_cast<int>(a.uint_max("payments", 3, 10000));
            const auto pieces = static_cast<std::uint32_t>(a.uint_max("pieces", 3, 1000));
            if (pieces == 0) throw ConfigError(a.path("pieces"), "must be positive");
            const auto max_amount = a.uint("max_amount", UINT64_MAX);
            if (max_amount == 0) throw ConfigError(a.path("max_amount"), "must be positive");
            for (std::uint64_t b = a.uint("blocks", 1); b > 0; --b) {
                auto& node = net_.full_node(node_id);
                for (auto& tx : random_payments(spendable(node), rng_, wallets, payments, pieces, max_amount)) {
                    node.submit_transaction(std::move(tx));
                }
                mine(a, node_id, reward);
                for (const auto& id : updates) update(id);
            }
        } else if (action == "update") {
            update(diet_id(a, "node"));
        } else if (action == "sync") {
            auto adv = adversary_id(a, "node");
            auto from = full_id(a, "from");
            net_.sync_from(adv, from, static_cast<std::uint32_t>(a.uint("height", net_.full_node(from).tip_height())));
        } else if (action == "forge") {
            auto adv = adversary_id(a, "node");
            auto& node = net_.full_node(adv);
            node.forge_coins_next_block({fake_coin(adv, node.tip_height() + 1, key(a, "owner"), a.uint("value"))});
        } else if (action == "rule") {
            auto name = a.str("rule");
            auto kind = rule_kind_from_string(name);
            if (!kind) throw ConfigError(a.path("rule"), "unknown rule '" + name + "'");
            AdversaryRule rule{*kind, diet_id(a, "victim"), {}};
            if (*kind == RuleKind::kServeForgedChain) rule.adversary = adversary_id(a, "adversary");
            net_.add_rule(std::move(rule));
        } else if (action == "forge-chain") {
            forge_chain(a);
        } else {
            throw ConfigError(a.path("action"), "unknown action '" + action + "'");
        }
    }

    static Coin fake_coin(const NodeId& adv, std::uint32_t height, const KeyPair& owner, std::uint64_t value) {
        return Coin{OutPoint{hash256("forged:" + adv + ":" + std::to_string(height)), 0}, value,
                    challenge_of(owner.public_key)};
    }

    /**
     * The adversary copies the honest chain up to the fork point, then mines `blocks` blocks on
     * it. The first one slips a fake coin into its committed state. With one block the user is
     * paid from real coins in that same block; with more, the last block spends the fake coin.
     * Every block is internally coherent: valid work, roots matching the forged state.
     */
    void forge_chain(const Cfg& a) {
        auto adv = adversary_id(a, "node");
        auto from = full_id(a, "from");
        auto& node = net_.full_node(adv);
        const auto fork = static_cast<std::uint32_t>(a.uint("fork_height", net_.full_node(from).tip_height()));
        if (node.tip_height() > fork) throw ConfigError(a.path("fork_height"), "adversary is already past it");
        net_.sync_from(adv, from, fork);
        const auto n = a.uint("blocks");
        if (n == 0) throw ConfigError(a.path("blocks"), "must be positive");
        const auto reward = reward_of(a, adv);
        const auto& owner = key(a, "fake_owner");
        const auto& to = key(a, "pay_to");
        node.forge_coins_next_block({fake_coin(adv, fork + 1, owner, a.uint("fake_value"))});
        if (n == 1) {
            auto tx = payment(a, node, key(a, "payer"), to);
            name_tx(a, tx);
            node.submit_transaction(std::move(tx));
            mine(a, adv, reward);
            return;
        }
        for (std::uint64_t i = 1; i < n; ++i) mine(a, adv, reward);
        auto tx = payment(a, node, owner, to);
        name_tx(a, tx);
        node.submit_transaction(std::move(tx));
        mine(a, adv, reward);
    }

    void update(const NodeId& id) {
        auto verdicts = net_.update(id);
        auto& all = verdicts_[id];
        all.insert(all.end(), verdicts.begin(), verdicts.end());
    }

    std::string tx_name(const Digest32& id) const {
        auto it = names_.find(id);
        return it == names_.end() ? id.hex() : it->second;
    }

    // Expectations.

    ExpectationResult check(const Cfg& e, std::size_t index) {
        ExpectationResult r;
        r.index = index;
        r.type = e.str("type");
        std::ostringstream detail;
        const auto& t = r.type;
        if (t == "verdict") {
            auto node = diet_id(e, "node");
            auto name = e.str("tx");
            if (!named_.contains(name)) throw ConfigError(e.path("tx"), "unknown transaction id '" + name + "'");
            const auto id = txid(named_.at(name));
            const TxVerdict* last = nullptr;
            for (const auto& v : verdicts_[node]) {
                if (v.txid == id) last = &v;
            }
            if (!last) {
                detail << node << " gave no verdict for " << name;
            } else {
                const auto want = e.str("verdict");
                r.passed = to_string(last->kind) == want;
                detail << node << " on " << name << ": " << to_string(last->kind);
                if (last->kind == VerdictKind::kRejected) {
                    detail << " (" << to_string(last->reason) << " at " << last->reject_height << ")";
                }
                if (e.has("reason")) r.passed = r.passed && to_string(last->reason) == e.str("reason");
                if (e.has("reject_height")) r.passed = r.passed && last->reject_height == e.uint("reject_height");
                detail << ", expected " << want;
                if (e.has("reason")) detail << " (" << e.str("reason") << ")";
            }
        } else if (t == "all-verdicts") {
            auto node = diet_id(e, "node");
            const auto want = e.str("verdict");
            const auto min = e.uint("min_count", 1);
            const auto& vs = verdicts_[node];
            std::size_t off = 0;
            for (const auto& v : vs) off += to_string(v.kind) != want;
            r.passed = off == 0 && vs.size() >= min;
            detail << node << ": " << vs.size() << " verdicts, " << off << " not " << want << " (need at least "
                   << min << ")";
        } else if (t == "tip-agree") {
            auto ids = e.strings("nodes");
            if (ids.size() < 2) throw ConfigError(e.path("nodes"), "name at least two nodes");
            std::set<Digest32> tips;
            for (const auto& id : ids) {
                if (!net_.has_full_node(id)) throw ConfigError(e.path("nodes"), "unknown full node '" + id + "'");
                tips.insert(net_.full_node(id).tip());
            }
            r.passed = tips.size() == 1;
            detail << tips.size() << " distinct tips, height " << net_.full_node(ids.front()).tip_height();
        } else if (t == "accepted-all") {
            auto node = full_id(e, "node");
            std::size_t accepted = 0, rejected = 0;
            for (const auto& rec : net_.trace()) {
                if (rec.value("event", "") != "block" || rec.value("node", "") != node) continue;
                const auto status = rec.value("status", "");
                accepted += status == "accepted" || status == "mined";
                rejected += status == "rejected";
            }
            r.passed = rejected == 0 && accepted > 0;
            detail << node << ": " << accepted << " blocks accepted, " << rejected << " rejected";
        } else if (t == "shard-cap") {
            auto node = full_id(e, "node");
            const auto& store = net_.full_node(node).utxo();
            const auto cap = e.uint("cap", params_.sharding.size_cap);
            std::uint64_t worst = 0;
            bool ok = true;
            for (std::uint32_t h = 0; h <= net_.full_node(node).tip_height(); ++h) {
                const auto total = store.total_bytes_before(h + 1);
                const auto k = store.k_before(h + 1);
                ok = ok && ceil_div_ok(total, k, cap);
                worst = std::max(worst, total >> k);
            }
            r.passed = ok;
            detail << node << ": largest average shard " << worst << " bytes, cap " << cap;
        } else if (t == "halving") {
            auto node = full_id(e, "node");
            const auto& store = net_.full_node(node).utxo();
            const auto tolerance = e.uint("tolerance", 1);
            const auto& events = store.rebalance_log();
            bool ok = events.size() >= e.uint("min_events", 1);
            for (const auto& ev : events) {
                const auto exact = ev.avg_before >> (ev.k_to - ev.k_from);
                // Measured from the stored shards after the block, not from the event.
                const auto measured = store.total_bytes_before(ev.height + 1) >> store.k_before(ev.height + 1);
                const auto diff = measured > exact ? measured - exact : exact - measured;
                ok = ok && diff <= tolerance && store.k_before(ev.height + 1) == ev.k_to;
                detail << "h" << ev.height << " k " << ev.k_from << "->" << ev.k_to << " avg " << ev.avg_before
                       << "->" << measured << "; ";
            }
            r.passed = ok;
            detail << events.size() << " rebalance events";
        } else if (t == "k-at-least") {
            auto node = full_id(e, "node");
            const auto k = net_.full_node(node).utxo().k();
            r.passed = k >= e.uint("k");
            detail << node << ": k = " << k << ", need at least " << e.uint("k");
        } else if (t == "utxos-fraction") {
            auto node = diet_id(e, "node");
            auto full = full_id(e, "full");
            const auto max = e.number("max");
            const auto& store = net_.full_node(full).utxo();
            const auto& costs = net_.diet_node(node).block_costs();
            double worst = 0;
            for (const auto& c : costs) {
                const auto set = serialized_set_size(store.coins_before(c.height), store.k_before(c.height));
                const double frac = set == 0 ? 1.0 : static_cast<double>(c.utxos_bytes) / static_cast<double>(set);
                worst = std::max(worst, frac);
            }
            r.passed = !costs.empty() && worst <= max;
            detail << node << ": " << costs.size() << " verified blocks, worst utxos/set ratio " << worst << ", max "
                   << max;
        } else if (t == "max-touched") {
            auto node = diet_id(e, "node");
            const auto max = e.uint("max");
            const auto& costs = net_.diet_node(node).block_costs();
            std::uint32_t worst = 0;
            for (const auto& c : costs) worst = std::max(worst, c.shards);
            r.passed = !costs.empty() && worst <= max;
            detail << node << ": " << costs.size() << " verified blocks, at most " << worst << " shards each";
        } else if (t == "bandwidth-consistent") {
            auto node = diet_id(e, "node");
            std::uint64_t traced = 0;
            for (const auto& rec : net_.trace()) {
                if (rec.value("event", "") != "message") continue;
                if (rec.value("from", "") == node || rec.value("to", "") == node) traced += rec["bytes"].get<std::uint64_t>();
            }
            const auto& bw = net_.diet_node(node).bandwidth();
            std::uint64_t counted = bw.total_down();
            for (const auto& [type, bytes] : bw.up) counted += bytes;
            r.passed = traced == counted;
            detail << node << ": counters " << counted << " bytes, trace " << traced << " bytes";
        } else {
            throw ConfigError(e.path("type"), "unknown expectation '" + t + "'");
        }
        r.detail = detail.str();
        return r;
    }

    json summary(const ScenarioReport& report) {
        json out;
        out["name"] = name_;
        out["seed"] = seed_;
        out["target_bits"] = bits_;
        out["passed"] = report.passed();
        out["trace_events"] = net_.trace().size();
        json expectations = json::array();
        for (const auto& x : report.expectations) {
            expectations.push_back({{"index", x.index}, {"type", x.type}, {"passed", x.passed}, {"detail", x.detail}});
        }
        out["expectations"] = expectations;

        json full = json::object();
        json light = json::object();
        for (const auto& [id, role] : roles_) {
            if (net_.has_full_node(id)) {
                full[id] = full_summary(net_.full_node(id), role);
            } else {
                light[id] = diet_summary(id, role);
            }
        }
        out["full_nodes"] = full;
        out["diet_nodes"] = light;
        return out;
    }

    static json full_summary(const FullNode& node, const std::string& role) {
        const auto& store = node.utxo();
        json k_history = json::array();
        json avg = json::array();
        json totals = json::array();
        unsigned last_k = ~0u;
        for (std::uint32_t h = 0; h <= node.tip_height(); ++h) {
            const auto k = store.k_before(h + 1);
            const auto total = store.total_bytes_before(h + 1);
            if (k != last_k) k_history.push_back({{"height", h}, {"k", k}});
            last_k = k;
            avg.push_back(total >> k);
            totals.push_back(total);
        }
        json rebalances = json::array();
        for (const auto& ev : store.rebalance_log()) {
            rebalances.push_back({{"height", ev.height},
                                  {"k_from", ev.k_from},
                                  {"k_to", ev.k_to},
                                  {"total_bytes", ev.total_bytes},
                                  {"avg_before", ev.avg_before},
                                  {"avg_after", ev.avg_after}});
        }
        return {{"role", role},
                {"tip_height", node.tip_height()},
                {"tip", node.tip().hex()},
                {"k", store.k()},
                {"k_history", k_history},
                {"avg_shard_size", avg},
                {"total_bytes", totals},
                {"rebalances", rebalances}};
    }

    json diet_summary(const NodeId& id, const std::string& role) {
        const auto& node = net_.diet_node(id);
        json verdicts = json::array();
        for (const auto& v : verdicts_[id]) {
            json rec{{"tx", tx_name(v.txid)}, {"txid", v.txid.hex()}, {"height", v.height}, {"verdict", to_string(v.kind)}};
            if (v.range) {
                rec["first"] = v.range->first;
                rec["last"] = v.range->last;
            }
            if (v.kind == VerdictKind::kRejected) {
                rec["reason"] = to_string(v.reason);
                rec["reject_height"] = v.reject_height;
            }
            verdicts.push_back(std::move(rec));
        }
        json down = json::object();
        json up = json::object();
        for (const auto& [type, bytes] : node.bandwidth().down) down[std::string(to_string(type))] = bytes;
        for (const auto& [type, bytes] : node.bandwidth().up) up[std::string(to_string(type))] = bytes;
        json costs = json::array();
        for (const auto& c : node.block_costs()) {
            costs.push_back({{"height", c.height}, {"block_bytes", c.block_bytes}, {"utxos_bytes", c.utxos_bytes},
                             {"shards", c.shards}});
        }
        return {{"role", role},
                {"tip_height", node.tip_height()},
                {"highest_verified", node.highest_verified()},
                {"verdicts", verdicts},
                {"bandwidth", {{"down", down}, {"up", up}, {"messages", node.bandwidth().messages},
                               {"total_down", node.bandwidth().total_down()}}},
                {"block_costs", costs}};
    }

    Cfg root_;
    Network net_;
    std::string name_;
    std::uint64_t seed_{0};
    std::uint8_t bits_{0};
    ChainParams params_;
    std::map<std::string, KeyPair> keys_;
    std::string default_key_;
    Block genesis_;
    std::map<NodeId, std::string> roles_;
    std::map<NodeId, PublicKey> reward_;
    std::map<std::string, Transaction> named_;
    std::map<Digest32, std::string> names_;
    std::map<NodeId, std::vector<TxVerdict>> verdicts_;
    std::mt19937_64 rng_;
};

}  // namespace

bool ScenarioReport::passed() const {
    return std::all_of(expectations.begin(), expectations.end(), [](const auto& e) { return e.passed; });
}

std::string ScenarioReport::text(bool verbose) const {
    std::ostringstream out;
    out << "scenario " << name << " (seed " << seed << "): " << (passed() ? "PASS" : "FAIL") << "\n";
    for (const auto& [id, n] : json.at("full_nodes").items()) {
        out << "  " << n.at("role").get<std::string>() << " " << id << ": height " << n.at("tip_height") << ", k "
            << n.at("k") << ", " << n.at("rebalances").size() << " rebalances\n";
    }
    for (const auto& [id, n] : json.at("diet_nodes").items()) {
        std::map<std::string, int> counts;
        for (const auto& v : n.at("verdicts")) ++counts[v.at("verdict").get<std::string>()];
        out << "  " << n.at("role").get<std::string>() << " " << id << ": " << n.at("verdicts").size() << " verdicts";
        for (const auto& [kind, c] : counts) out << ", " << kind << " " << c;
        out << "; " << n.at("bandwidth").at("total_down") << " bytes down, highest verified "
            << n.at("highest_verified") << "\n";
        if (!verbose) continue;
        for (const auto& v : n.at("verdicts")) {
            out << "    " << v.at("tx").get<std::string>() << " @" << v.at("height") << " "
                << v.at("verdict").get<std::string>();
            if (v.contains("first")) out << " [" << v.at("first") << ".." << v.at("last") << "]";
            if (v.contains("reason")) out << " " << v.at("reason").get<std::string>() << " at " << v.at("reject_height");
            out << "\n";
        }
    }
    for (const auto& e : expectations) {
        out << "  [" << (e.passed ? "pass" : "FAIL") << "] expect[" << e.index << "] " << e.type << ": " << e.detail
            << "\n";
    }
    return out.str();
}

nlohmann::json load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string(), e.what());
    }
}

ScenarioReport run_scenario(const nlohmann::json& config, const ScenarioOptions& options) {
    if (!config.is_object()) throw ConfigError("", "a scenario is a JSON object");
    Runner runner(config, options);
    return runner.run();
}

std::vector<ScenarioInfo> list_scenarios(const std::filesystem::path& dir) {
    std::vector<ScenarioInfo> out;
    if (!std::filesystem::is_directory(dir)) throw ConfigError(dir.string(), "not a directory");
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        auto j = load_scenario_file(entry.path());
        out.push_back(ScenarioInfo{entry.path(), j.value("name", entry.path().stem().string()),
                                   j.value("description", "")});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path.filename() < b.path.filename(); });
    return out;
}

}  // namespace dietnet
