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

#include "dietnet/netsim.hpp"

#include "dietnet/errors.hpp"
#include "dietnet/miner.hpp"

namespace dietnet {

namespace {

std::uint64_t id_seed(const NodeId& id) {
    auto d = hash256(id);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d.bytes[i];
    return v;
}

}  // namespace

std::string_view to_string(RuleKind kind) {
    switch (kind) {
        case RuleKind::kServeForgedChain: return "serve-forged-chain";
        case RuleKind::kReplaceShardBytes: return "replace-shard-bytes";
        case RuleKind::kReplaceRoot: return "replace-root";
        case RuleKind::kReplaceSibling: return "replace-sibling";
    }
    return "unknown";
}

std::optional<RuleKind> rule_kind_from_string(std::string_view name) {
    for (auto kind : {RuleKind::kServeForgedChain, RuleKind::kReplaceShardBytes, RuleKind::kReplaceRoot,
                      RuleKind::kReplaceSibling}) {
        if (to_string(kind) == name) return kind;
    }
    return std::nullopt;
}

class Network::BusTransport final : public Transport {
  public:
    BusTransport(Network& net, NodeId self) : net_{net}, self_{std::move(self)} {}

    Bytes request(MsgType type, const Bytes& payload) override {
        NodeId server = net_.diet_peer_.at(self_);
        for (const auto& rule : net_.rules_) {
            if (rule.kind == RuleKind::kServeForgedChain && rule.victim == self_) server = rule.adversary;
        }
        net_.record({{"event", "message"},
                     {"type", to_string(type)},
                     {"code", static_cast<int>(type)},
                     {"from", self_},
                     {"to", server},
                     {"bytes", payload.size()}});
        auto it = net_.full_.find(server);
        if (it == net_.full_.end()) {
            net_.record({{"event", "error"}, {"from", self_}, {"to", server}, {"error", "unknown node"}});
            throw QueryError(RejectReason::kQueryFailed, "no node " + server);
        }
        const auto rtype = reply_type(type);
        auto reply = net_.apply_rules(self_, rtype, it->second->handle_query(type, payload));
        net_.record({{"event", "message"},
                     {"type", to_string(rtype)},
                     {"code", static_cast<int>(rtype)},
                     {"from", server},
                     {"to", self_},
                     {"bytes", reply.size()}});
        return reply;
    }

  private:
    Network& net_;
    NodeId self_;
};

Network::Network(std::uint64_t seed) : rng_state_{seed}, seed_{seed} {}

FullNode& Network::add_full_node(const NodeId& id, const ChainParams& params, const Block& genesis) {
    if (full_.contains(id) || diet_.contains(id)) throw ConfigError("", "duplicate node id " + id);
    auto& slot = full_[id];
    slot = std::make_unique<FullNode>(params, genesis);
    return *slot;
}

FullNode& Network::add_adversary(const NodeId& id, const ChainParams& params, const Block& genesis,
                                 std::uint32_t mining_budget) {
    auto& node = add_full_node(id, params, genesis);
    budgets_[id] = mining_budget;
    return node;
}

DietNode& Network::add_diet_node(const NodeId& id, DietConfig config, const BlockHeader& genesis,
                                 const NodeId& peer) {
    if (full_.contains(id) || diet_.contains(id)) throw ConfigError("", "duplicate node id " + id);
    auto& slot = diet_[id];
    slot = std::make_unique<DietNode>(std::move(config), genesis);
    diet_peer_[id] = peer;
    return *slot;
}

void Network::link(const NodeId& a, const NodeId& b) {
    if (!full_.contains(a) || !full_.contains(b)) throw ConfigError("", "links join two full nodes: " + a + ", " + b);
    if (is_adversary(a) || is_adversary(b)) throw ConfigError("", "adversary nodes do not relay to honest nodes");
    links_[a].push_back(b);
    links_[b].push_back(a);
}

void Network::add_rule(AdversaryRule rule) {
    if (!diet_.contains(rule.victim)) throw ConfigError("", "rule victim " + rule.victim + " is not a diet node");
    if (rule.kind == RuleKind::kServeForgedChain && !is_adversary(rule.adversary)) {
        throw ConfigError("", "rule adversary " + rule.adversary + " is not an adversary node");
    }
    record({{"event", "rule"}, {"rule", to_string(rule.kind)}, {"victim", rule.victim}, {"adversary", rule.adversary}});
    rules_.push_back(std::move(rule));
}

FullNode& Network::full_node(const NodeId& id) {
    auto it = full_.find(id);
    if (it == full_.end()) throw ConfigError("", "no full node " + id);
    return *it->second;
}

DietNode& Network::diet_node(const NodeId& id) {
    auto it = diet_.find(id);
    if (it == diet_.end()) throw ConfigError("", "no diet node " + id);
    return *it->second;
}

std::uint32_t Network::blocks_mined(const NodeId& id) const {
    auto it = mined_.find(id);
    return it == mined_.end() ? 0 : it->second;
}

Block Network::mine(const NodeId& miner, const PublicKey& reward_key, std::uint8_t target_bits) {
    auto& node = full_node(miner);
    if (auto b = budgets_.find(miner); b != budgets_.end() && blocks_mined(miner) >= b->second) {
        throw ConfigError("", "adversary " + miner + " exceeded its mining budget of " + std::to_string(b->second) +
                                  " blocks");
    }
    auto tmpl = make_template(node, node.mempool(), reward_key, target_bits);
    auto block = mine_block(tmpl, node, seed_ ^ id_seed(miner));
    auto r = node.connect_block(block);
    if (!r.accepted()) {
        throw InconsistentStateError(miner + " rejected its own block: " + std::string(to_string(r.reason)));
    }
    ++mined_[miner];
    record({{"event", "block"},
            {"node", miner},
            {"status", "mined"},
            {"height", block.header.height},
            {"hash", header_hash(block.header).hex()},
            {"txs", block.transactions.size()}});
    auto bytes = encode(block);
    for (const auto& peer : links_[miner]) send(SimMessage{MsgType::kBlockAnnounce, miner, peer, bytes});
    return block;
}

void Network::sync_from(const NodeId& adversary, const NodeId& honest, std::uint32_t height) {
    auto& adv = full_node(adversary);
    auto& src = full_node(honest);
    if (height > src.tip_height()) {
        throw ConfigError("", honest + " has no block at height " + std::to_string(height));
    }
    for (auto h = adv.tip_height() + 1; h <= height; ++h) {
        auto r = adv.connect_block(src.block_at(h));
        if (!r.accepted()) throw InconsistentStateError("sync rejected block " + std::to_string(h));
    }
    record({{"event", "sync"}, {"node", adversary}, {"from", honest}, {"height", height}});
}

void Network::send(SimMessage msg) {
    auto key = std::make_pair(msg.from, msg.to);
    queues_[key].push_back(std::move(msg));
}

std::uint64_t Network::next_random() {
    // splitmix64
    std::uint64_t z = (rng_state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::size_t Network::run_until_idle() {
    std::size_t delivered = 0;
    for (;;) {
        std::vector<std::deque<SimMessage>*> ready;
        for (auto& [key, q] : queues_) {
            if (!q.empty()) ready.push_back(&q);
        }
        if (ready.empty()) break;
        auto& q = *ready[next_random() % ready.size()];
        auto msg = std::move(q.front());
        q.pop_front();
        deliver(msg);
        ++delivered;
    }
    std::erase_if(queues_, [](const auto& kv) { return kv.second.empty(); });
    return delivered;
}

void Network::deliver(const SimMessage& msg) {
    record({{"event", "message"},
            {"type", to_string(msg.type)},
            {"code", static_cast<int>(msg.type)},
            {"from", msg.from},
            {"to", msg.to},
            {"bytes", msg.payload.size()}});
    auto it = full_.find(msg.to);
    if (it == full_.end()) {
        record({{"event", "error"}, {"from", msg.from}, {"to", msg.to}, {"error", "unknown node"}});
        return;
    }
    if (msg.type != MsgType::kBlockAnnounce) {
        record({{"event", "error"}, {"from", msg.from}, {"to", msg.to}, {"error", "unexpected message type"}});
        return;
    }
    Block block;
    try {
        block = decode_block(msg.payload);
    } catch (const DecodeError& e) {
        record({{"event", "error"}, {"from", msg.from}, {"to", msg.to}, {"error", e.what()}});
        return;
    }
    auto r = it->second->connect_block(block);
    TraceRecord rec{{"event", "block"},
                    {"node", msg.to},
                    {"status", to_string(r.status)},
                    {"height", block.header.height},
                    {"hash", header_hash(block.header).hex()}};
    if (r.reason != RejectReason::kNone) rec["reason"] = to_string(r.reason);
    record(std::move(rec));
    if (r.status != ConnectStatus::kAccepted && r.status != ConnectStatus::kStoredAsBranch) return;
    for (const auto& peer : links_[msg.to]) {
        if (peer != msg.from) send(SimMessage{MsgType::kBlockAnnounce, msg.to, peer, msg.payload});
    }
}

Bytes Network::apply_rules(const NodeId& victim, MsgType type, Bytes reply) {
    for (const auto& rule : rules_) {
        if (rule.victim != victim || reply.empty() || reply.front() != 0) continue;
        bool changed = false;
        if (rule.kind == RuleKind::kReplaceShardBytes && type == MsgType::kUtxos) {
            auto r = decode_utxos_reply(reply);
            if (r.shards.empty()) continue;
            auto target = r.shards.begin();
            for (auto it = r.shards.begin(); it != r.shards.end(); ++it) {
                if (!it->second.coins.empty()) {
                    target = it;
                    break;
                }
            }
            auto& coins = target->second.coins;
            if (coins.empty()) {
                coins.push_back(Coin{OutPoint{hash256("injected"), 0}, 1, hash256("injected")});
            } else {
                coins.front().value += 1;
            }
            reply = encode(r);
            changed = true;
        } else if (rule.kind == RuleKind::kReplaceRoot && type == MsgType::kUtxoMRoot) {
            auto root = decode_root_reply(reply);
            reply = encode_root_reply(hash256(root.span()));
            changed = true;
        } else if (rule.kind == RuleKind::kReplaceSibling && type == MsgType::kMerkleBlocks) {
            auto r = decode_merkle_blocks_reply(reply);
            for (auto& m : r.matches) {
                auto& tree = m.tx_tree;
                if (!tree.siblings.empty()) {
                    tree.siblings.begin()->second.bytes[0] ^= 1;
                } else if (!tree.included.empty()) {
                    tree.included.begin()->second.bytes[0] ^= 1;
                }
                changed = true;
            }
            reply = encode(r);
        }
        if (changed) {
            record({{"event", "rewrite"}, {"rule", to_string(rule.kind)}, {"victim", victim}, {"type", to_string(type)}});
        }
    }
    return reply;
}

std::vector<TxVerdict> Network::update(const NodeId& diet) {
    auto& node = diet_node(diet);
    BusTransport transport(*this, diet);
    auto verdicts = node.update_chain(transport);
    for (const auto& v : verdicts) {
        TraceRecord rec{{"event", "verdict"},
                        {"node", diet},
                        {"txid", v.txid.hex()},
                        {"height", v.height},
                        {"verdict", to_string(v.kind)}};
        if (v.range) {
            rec["first"] = v.range->first;
            rec["last"] = v.range->last;
        }
        if (v.kind == VerdictKind::kRejected) {
            rec["reason"] = to_string(v.reason);
            rec["reject_height"] = v.reject_height;
        }
        record(std::move(rec));
    }
    return verdicts;
}

void Network::note(TraceRecord record_) { record(std::move(record_)); }

void Network::record(TraceRecord rec) {
    rec["seq"] = seq_++;
    trace_.push_back(std::move(rec));
}

std::string Network::trace_lines() const {
    std::string out;
    for (const auto& rec : trace_) {
        out += rec.dump();
        out += '\n';
    }
    return out;
}

}  // namespace dietnet
