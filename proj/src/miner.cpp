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

#include "dietnet/miner.hpp"

#include <map>
#include <set>

#include "dietnet/errors.hpp"

namespace dietnet {

namespace {

Transaction make_coinbase(std::uint32_t height, const PublicKey& reward_key, std::uint64_t reward,
                          const Digest32& commitment, std::uint64_t extra_nonce) {
    Transaction cb;
    cb.version = height;
    cb.inputs.push_back(TxInput{OutPoint::coinbase_marker(), {}, {}});
    cb.outputs.push_back(TxOutput{reward, OutputKind::kPayToPubkeyHash, challenge_of(reward_key)});
    cb.outputs.push_back(TxOutput{extra_nonce, OutputKind::kCommitment, commitment});
    return cb;
}

// Evolving view over the node's live set: what the next block may spend after txs so far.
class Overlay {
  public:
    explicit Overlay(const FullNode& node) : base_{node.view()} {}

    [[nodiscard]] CoinLookup lookup() {
        return [this](const OutPoint& op) -> std::optional<Coin> {
            if (spent_.contains(op)) return std::nullopt;
            if (auto it = created_.find(op); it != created_.end()) return it->second;
            return base_(op);
        };
    }

    void apply(const Transaction& tx) {
        for (const auto& in : tx.inputs) {
            created_.erase(in.prevout);
            spent_.insert(in.prevout);
        }
        for (const auto& coin : coins_created_by(tx, txid(tx))) created_.emplace(coin.outpoint, coin);
    }

  private:
    CoinLookup base_;
    std::map<OutPoint, Coin> created_;
    std::set<OutPoint> spent_;
};

}  // namespace

BlockTemplate make_template(const FullNode& node, std::span<const Transaction> candidates,
                            const PublicKey& reward_key, std::uint8_t target_bits) {
    BlockTemplate tmpl{node.tip(), node.tip_height() + 1, target_bits, {}, reward_key};
    Overlay overlay(node);
    std::set<OutPoint> used;
    for (const auto& tx : candidates) {
        bool conflict = false;
        for (const auto& in : tx.inputs) conflict = conflict || used.contains(in.prevout);
        if (conflict) continue;
        if (!node.skips_tx_validation() && !validate_transaction(tx, overlay.lookup()).ok()) continue;
        for (const auto& in : tx.inputs) used.insert(in.prevout);
        overlay.apply(tx);
        tmpl.txs.push_back(tx);
    }
    return tmpl;
}

Block assemble_block(const BlockTemplate& tmpl, const FullNode& node, std::uint64_t extra_nonce) {
    if (tmpl.parent != node.tip() || tmpl.height != node.tip_height() + 1) {
        throw ParamError("block template does not extend the node's tip");
    }
    std::set<OutPoint> used;
    for (const auto& tx : tmpl.txs) {
        for (const auto& in : tx.inputs) {
            if (!used.insert(in.prevout).second) throw ParamError("block template spends a coin twice");
        }
    }

    std::uint64_t fees = 0;
    Overlay overlay(node);
    for (const auto& tx : tmpl.txs) {
        auto check = validate_transaction(tx, overlay.lookup());
        if (check.ok()) {
            fees += check.fee;
        } else if (!node.skips_tx_validation()) {
            throw ParamError("block template holds an invalid transaction: " + std::string(to_string(check.reason)));
        }
        overlay.apply(tx);
    }

    Block block;
    block.transactions.push_back(make_coinbase(tmpl.height, tmpl.reward_key, node.params().subsidy + fees,
                                               node.preview_commitment(tmpl.txs), extra_nonce));
    block.transactions.insert(block.transactions.end(), tmpl.txs.begin(), tmpl.txs.end());
    block.header.prev_hash = tmpl.parent;
    block.header.tx_mroot = tx_merkle_root(block.transactions);
    block.header.target_bits = tmpl.target_bits;
    block.header.height = tmpl.height;
    return block;
}

std::uint64_t start_nonce(std::uint64_t seed, std::uint32_t height) {
    // splitmix64 finaliser
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(height) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::optional<std::uint64_t> solve_pow(const BlockHeader& header, std::uint64_t max_attempts,
                                       std::uint64_t start) {
    if (max_attempts == 0) throw ParamError("solve_pow needs at least one attempt");
    BlockHeader h = header;
    for (std::uint64_t i = 0; i < max_attempts; ++i) {
        h.nonce = start + i;
        if (pow_ok(h)) return h.nonce;
    }
    return std::nullopt;
}

Block mine_block(const BlockTemplate& tmpl, const FullNode& node, std::uint64_t seed, MiningStats* stats,
                 std::uint64_t window) {
    for (std::uint64_t extra_nonce = 0;; ++extra_nonce) {
        Block block = assemble_block(tmpl, node, extra_nonce);
        const auto start = start_nonce(seed ^ extra_nonce, tmpl.height);
        auto nonce = solve_pow(block.header, window, start);
        if (!nonce) {
            if (stats) stats->attempts += window;
            continue;
        }
        if (stats) stats->attempts += *nonce - start + 1;
        block.header.nonce = *nonce;
        return block;
    }
}

Block mine_genesis(const ChainParams& params, const PublicKey& reward_key, std::uint64_t seed) {
    VersionedShardStore empty(params.sharding);
    Block block;
    block.transactions.push_back(make_coinbase(0, reward_key, params.subsidy, empty.preview({}).root, 0));
    block.header.tx_mroot = tx_merkle_root(block.transactions);
    block.header.target_bits = params.min_target_bits;
    auto nonce = solve_pow(block.header, std::uint64_t{1} << 40, start_nonce(seed, 0));
    block.header.nonce = *nonce;
    return block;
}

}  // namespace dietnet
