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
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dietnet/diet_node.hpp"
#include "dietnet/full_node.hpp"

namespace dietnet {

using NodeId = std::string;

struct SimMessage {
    MsgType type{MsgType::kBlockAnnounce};
    NodeId from;
    NodeId to;
    Bytes payload;
};

enum class RuleKind {
    //! Every query the victim sends is answered by the adversary's node instead of its peer.
    kServeForgedChain,
    //! Flip a coin value inside the first non-empty shard of utxos replies.
    kReplaceShardBytes,
    //! Replace the root in utxo-mroot replies.
    kReplaceRoot,
    //! Flip one sibling hash in each transaction proof of merkle-blocks replies.
    kReplaceSibling,
};

[[nodiscard]] std::string_view to_string(RuleKind kind);
[[nodiscard]] std::optional<RuleKind> rule_kind_from_string(std::string_view name);

struct AdversaryRule {
    RuleKind kind{RuleKind::kServeForgedChain};
    NodeId victim;
    //! The adversary node answering in place of the victim's peer (kServeForgedChain only).
    NodeId adversary;
};

using TraceRecord = nlohmann::json;

/**
 * A deterministic message bus between full nodes (block relay) and diet nodes (queries).
 *
 * Relay messages wait in per-link FIFO queues; run_until_idle delivers them one at a time,
 * picking the next link with a generator seeded at construction. Diet queries are synchronous
 * request/response exchanges routed to the diet node's peer. Every message, block outcome and
 * verdict is appended to the trace with a sequence number.
 *
 * Adversary nodes are ordinary full nodes flagged as such. They have a mining budget and never
 * relay to honest nodes; their influence reaches victims only through the rules.
 */
class Network {
  public:
    explicit Network(std::uint64_t seed);

    FullNode& add_full_node(const NodeId& id, const ChainParams& params, const Block& genesis);
    FullNode& add_adversary(const NodeId& id, const ChainParams& params, const Block& genesis,
                            std::uint32_t mining_budget);
    DietNode& add_diet_node(const NodeId& id, DietConfig config, const BlockHeader& genesis, const NodeId& peer);
    //! Two-way block relay between full nodes.
    void link(const NodeId& a, const NodeId& b);
    void add_rule(AdversaryRule rule);

    [[nodiscard]] FullNode& full_node(const NodeId& id);
    [[nodiscard]] DietNode& diet_node(const NodeId& id);
    [[nodiscard]] bool has_full_node(const NodeId& id) const { return full_.contains(id); }
    [[nodiscard]] bool has_diet_node(const NodeId& id) const { return diet_.contains(id); }
    [[nodiscard]] bool is_adversary(const NodeId& id) const { return budgets_.contains(id); }

    /**
     * Mines one block on the node's tip from its mempool, connects it and queues announcements
     * to its peers. Adversary nodes draw on their budget; exceeding it throws ConfigError.
     */
    Block mine(const NodeId& miner, const PublicKey& reward_key, std::uint8_t target_bits);

    //! The adversary replays the honest node's active chain up to `height` (a read of public data).
    void sync_from(const NodeId& adversary, const NodeId& honest, std::uint32_t height);

    //! Queues a raw message; used for relay and to exercise delivery errors.
    void send(SimMessage msg);

    //! Delivers queued messages until none remain. Returns the number delivered.
    std::size_t run_until_idle();

    //! One updateChain round of a diet node through the bus.
    std::vector<TxVerdict> update(const NodeId& diet);

    void note(TraceRecord record);
    [[nodiscard]] const std::vector<TraceRecord>& trace() const { return trace_; }
    //! One JSON object per line.
    [[nodiscard]] std::string trace_lines() const;
    [[nodiscard]] std::uint32_t blocks_mined(const NodeId& id) const;

  private:
    class BusTransport;

    Bytes apply_rules(const NodeId& victim, MsgType reply_type, Bytes reply);
    void deliver(const SimMessage& msg);
    void record(TraceRecord record);
    std::uint64_t next_random();

    std::uint64_t rng_state_;
    std::uint64_t seed_;
    std::uint64_t seq_{0};
    std::map<NodeId, std::unique_ptr<FullNode>> full_;
    std::map<NodeId, std::unique_ptr<DietNode>> diet_;
    std::map<NodeId, NodeId> diet_peer_;
    std::map<NodeId, std::vector<NodeId>> links_;
    std::map<NodeId, std::uint32_t> budgets_;
    std::map<NodeId, std::uint32_t> mined_;
    std::map<std::pair<NodeId, NodeId>, std::deque<SimMessage>> queues_;
    std::vector<AdversaryRule> rules_;
    std::vector<TraceRecord> trace_;
};

}  // namespace dietnet
