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

#include "dietnet/diet_node.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "dietnet/merkle.hpp"
#include "dietnet/utxo_store.hpp"

namespace dietnet {

std::optional<VerificationRange> compute_verification_range(std::uint32_t highest_verified, std::uint32_t tip_height,
                                                            std::uint32_t max_depth, std::uint32_t max_length,
                                                            std::uint32_t last) {
    std::int64_t first = std::max<std::int64_t>(highest_verified, std::int64_t{tip_height} - max_depth);
    first = std::max<std::int64_t>(first, std::int64_t{last} - max_length);
    if (first >= last) return std::nullopt;
    return VerificationRange{static_cast<std::uint32_t>(first), last};
}

std::string_view to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::kSpvOnly: return "spv-only";
        case VerdictKind::kDietVerified: return "diet-verified";
        case VerdictKind::kRejected: return "rejected";
    }
    return "unknown";
}

std::uint64_t Bandwidth::total_down() const {
    std::uint64_t total = 0;
    for (const auto& [type, bytes] : down) total += bytes;
    return total;
}

DietNode::DietNode(DietConfig config, const BlockHeader& genesis) : config_{std::move(config)} {
    if (!genesis.prev_hash.is_zero() || genesis.height != 0) throw ParamError("genesis header must have height 0");
    auto hash = header_hash(genesis);
    headers_.emplace(hash, HeaderEntry{genesis, block_work(genesis.target_bits)});
    active_.push_back(hash);
    for (const auto& pk : config_.pub_keys) user_challenges_.push_back(challenge_of(pk));
}

const BlockHeader& DietNode::header_at(std::uint32_t height) const { return headers_.at(active_.at(height)).header; }

BloomFilter DietNode::make_filter() const {
    // Inputs reveal public keys and outputs carry challenges, so both go in.
    std::vector<Bytes> keys;
    for (std::size_t i = 0; i < config_.pub_keys.size(); ++i) {
        keys.emplace_back(config_.pub_keys[i].begin(), config_.pub_keys[i].end());
        keys.emplace_back(user_challenges_[i].bytes.begin(), user_challenges_[i].bytes.end());
    }
    return BloomFilter::build(keys, config_.bloom_bits, config_.bloom_hashes);
}

bool DietNode::concerns_user(const Transaction& tx) const {
    for (const auto& out : tx.outputs) {
        if (out.kind != OutputKind::kPayToPubkeyHash) continue;
        if (std::find(user_challenges_.begin(), user_challenges_.end(), out.payload) != user_challenges_.end()) {
            return true;
        }
    }
    return std::any_of(tx.inputs.begin(), tx.inputs.end(), [&](const TxInput& in) {
        return std::find(config_.pub_keys.begin(), config_.pub_keys.end(), in.public_key) != config_.pub_keys.end();
    });
}

void DietNode::switch_tip(const Digest32& new_tip) {
    std::vector<Digest32> path;
    for (auto h = new_tip;; h = headers_.at(h).header.prev_hash) {
        path.push_back(h);
        if (headers_.at(h).header.height == 0) break;
    }
    std::reverse(path.begin(), path.end());
    std::uint32_t common = 0;
    while (common + 1 < path.size() && common + 1 < active_.size() && path[common + 1] == active_[common + 1]) {
        ++common;
    }
    active_ = std::move(path);
    // Verification holds for one branch only.
    highest_verified_ = std::min(highest_verified_, common);
}

const Digest32& DietNode::verify_headers(const std::vector<BlockHeader>& headers) {
    last_header_reject_ = RejectReason::kNone;
    for (const auto& header : headers) {
        auto hash = header_hash(header);
        if (headers_.contains(hash)) continue;
        if (header.target_bits < config_.chain.min_target_bits || !pow_ok(header)) {
            last_header_reject_ = RejectReason::kPowFailure;
            break;
        }
        auto parent = headers_.find(header.prev_hash);
        if (parent == headers_.end()) {
            last_header_reject_ = RejectReason::kUnknownParent;
            break;
        }
        if (header.height != parent->second.header.height + 1) {
            last_header_reject_ = RejectReason::kBadHeight;
            break;
        }
        Work work = parent->second.work + block_work(header.target_bits);
        const bool heavier = work > headers_.at(tip()).work;
        headers_.emplace(hash, HeaderEntry{header, std::move(work)});
        if (heavier) switch_tip(hash);
    }
    return tip();
}

Bytes DietNode::exchange(Transport& peer, MsgType type, const Bytes& payload) {
    bandwidth_.up[type] += payload.size();
    auto reply = peer.request(type, payload);
    bandwidth_.down[reply_type(type)] += reply.size();
    bandwidth_.messages += 2;
    return reply;
}

std::vector<TxVerdict> DietNode::update_chain(Transport& peer) {
    MerkleBlocksReply reply;
    try {
        reply = decode_merkle_blocks_reply(
            exchange(peer, MsgType::kQueryMerkleBlocks, encode(MerkleBlocksQuery{tip(), make_filter()})));
    } catch (const QueryError&) {
        return {};
    } catch (const DecodeError&) {
        return {};
    }
    verify_headers(reply.headers);

    std::vector<TxVerdict> verdicts;
    for (const auto& match : reply.matches) {
        const auto block_hash = header_hash(match.header);
        const auto height = match.header.height;
        const bool on_chain = height < active_.size() && active_[height] == block_hash;
        std::optional<VerifyOutcome> outcome;

        for (const auto& tx : match.txs) {
            // Ignore bloom filter false positives.
            if (!concerns_user(tx)) continue;
            TxVerdict v;
            v.txid = txid(tx);
            v.height = height;
            if (!on_chain) {
                v.kind = VerdictKind::kRejected;
                v.reason = RejectReason::kUnknownHeader;
                v.reject_height = height;
                verdicts.push_back(v);
                continue;
            }
            bool proof_ok = contains(match.tx_tree, v.txid);
            try {
                proof_ok = proof_ok && partial_root(match.tx_tree) == match.header.tx_mroot;
            } catch (const IncompleteProofError&) {
                proof_ok = false;
            }
            if (!proof_ok) {
                v.kind = VerdictKind::kRejected;
                v.reason = RejectReason::kProofMismatch;
                v.reject_height = height;
            } else if (!config_.diet_enabled) {
                v.kind = VerdictKind::kSpvOnly;
            } else {
                if (!outcome) outcome = verify_blocks_up_to(peer, height);
                switch (outcome->status) {
                    case VerifyOutcome::Status::kVerified:
                        v.kind = VerdictKind::kDietVerified;
                        v.range = outcome->range;
                        break;
                    case VerifyOutcome::Status::kFallback:
                        if (auto it = verified_by_.find(block_hash); it != verified_by_.end()) {
                            v.kind = VerdictKind::kDietVerified;
                            v.range = it->second;
                        } else {
                            v.kind = VerdictKind::kSpvOnly;
                        }
                        break;
                    case VerifyOutcome::Status::kRejected:
                        v.kind = VerdictKind::kRejected;
                        v.reason = outcome->reason;
                        v.reject_height = outcome->height;
                        break;
                }
            }
            verdicts.push_back(v);
        }
    }
    return verdicts;
}

VerifyOutcome DietNode::verify_blocks_up_to(Transport& peer, std::uint32_t last) {
    VerifyOutcome out;
    if (last > tip_height()) {
        out.status = VerifyOutcome::Status::kRejected;
        out.reason = RejectReason::kUnknownHeader;
        out.height = last;
        return out;
    }
    auto range = compute_verification_range(highest_verified_, tip_height(), config_.max_depth, config_.max_length,
                                            last);
    if (!range) return out;
    out.range = range;

    auto reject = [&](RejectReason reason, std::uint32_t height) {
        out.status = VerifyOutcome::Status::kRejected;
        out.reason = reason;
        out.height = height;
        return out;
    };

    Digest32 trusted;
    try {
        // The first root is not verified.
        trusted = decode_root_reply(exchange(peer, MsgType::kQueryUtxoMRoot, encode_hash_query(active_[range->first])));
    } catch (const QueryError& e) {
        return reject(e.reason(), range->first);
    } catch (const DecodeError&) {
        return reject(RejectReason::kMalformed, range->first);
    }

    for (auto height = range->first + 1; height <= last; ++height) {
        RejectReason r;
        try {
            r = verify_block(peer, height, trusted);
        } catch (const QueryError& e) {
            r = e.reason();
        } catch (const DecodeError&) {
            r = RejectReason::kMalformed;
        }
        if (r != RejectReason::kNone) return reject(r, height);
        highest_verified_ = std::max(highest_verified_, height);
        verified_by_[active_[height]] = *range;
    }
    out.status = VerifyOutcome::Status::kVerified;
    return out;
}

RejectReason DietNode::verify_block(Transport& peer, std::uint32_t height, Digest32& trusted_root) {
    const auto& hash = active_[height];
    const auto& header = header_at(height);
    BlockCost cost;
    cost.height = height;

    auto block_bytes = exchange(peer, MsgType::kQueryBlock, encode_hash_query(hash));
    cost.block_bytes = block_bytes.size();
    const Block block = decode_block_reply(block_bytes);
    if (header_hash(block.header) != hash) return RejectReason::kBlockMismatch;
    const auto& txs = block.transactions;
    if (tx_merkle_root(txs) != header.tx_mroot) return RejectReason::kTxRootMismatch;
    if (!txs.front().is_coinbase() || txs.front().version != height) return RejectReason::kBadCoinbase;
    auto commitments = std::count_if(txs.front().outputs.begin(), txs.front().outputs.end(),
                                     [](const TxOutput& o) { return o.kind == OutputKind::kCommitment; });
    if (commitments != 1) return RejectReason::kBadCoinbase;
    const auto committed = *block.committed_utxo_root();
    for (std::size_t i = 1; i < txs.size(); ++i) {
        if (txs[i].is_coinbase()) return RejectReason::kMalformed;
    }

    auto utxos_bytes = exchange(peer, MsgType::kQueryUtxos, encode_hash_query(hash));
    cost.utxos_bytes = utxos_bytes.size();
    auto reply = decode_utxos_reply(utxos_bytes);

    // Shards against the trusted root.
    const auto total_leaves = reply.utxo_tree.total_leaves;
    if (total_leaves == 0 || !std::has_single_bit(total_leaves)) return RejectReason::kShardProofMismatch;
    const auto k = static_cast<unsigned>(std::countr_zero(total_leaves));
    if (reply.utxo_tree.included.size() != reply.shards.size()) return RejectReason::kShardProofMismatch;
    for (const auto& [idx, shard] : reply.shards) {
        auto it = reply.utxo_tree.included.find(idx);
        if (it == reply.utxo_tree.included.end() || it->second != shard.leaf_hash()) {
            return RejectReason::kShardProofMismatch;
        }
        for (const auto& coin : shard.coins) {
            if (shard_key(coin.outpoint.txid, k) != idx) return RejectReason::kShardProofMismatch;
        }
    }
    try {
        if (partial_root(reply.utxo_tree) != trusted_root) return RejectReason::kShardProofMismatch;
    } catch (const IncompleteProofError&) {
        return RejectReason::kShardProofMismatch;
    }

    // The parent's coinbase outputs enter the set first.
    const auto& parent_cb = reply.parent_coinbase;
    const auto parent_cb_id = txid(parent_cb);
    {
        const auto& proof = reply.parent_coinbase_proof;
        auto it = proof.included.find(0);
        bool ok = parent_cb.is_coinbase() && it != proof.included.end() && it->second == parent_cb_id;
        try {
            ok = ok && partial_root(proof) == header_at(height - 1).tx_mroot;
        } catch (const IncompleteProofError&) {
            ok = false;
        }
        if (!ok) return RejectReason::kCoinbaseProofMismatch;
    }

    auto shards = std::move(reply.shards);
    auto insert = [&](const Coin& coin) {
        auto it = shards.find(shard_key(coin.outpoint.txid, k));
        if (it == shards.end()) return RejectReason::kMissingShard;
        if (!it->second.insert(coin)) return RejectReason::kRootMismatch;
        return RejectReason::kNone;
    };
    for (const auto& coin : coins_created_by(parent_cb, parent_cb_id)) {
        if (auto r = insert(coin); r != RejectReason::kNone) return r;
    }

    CoinLookup lookup = [&](const OutPoint& op) -> std::optional<Coin> {
        auto it = shards.find(shard_key(op.txid, k));
        if (it == shards.end()) return std::nullopt;
        const auto* coin = it->second.find(op);
        return coin ? std::optional<Coin>{*coin} : std::nullopt;
    };
    std::uint64_t fees = 0;
    for (std::size_t i = 1; i < txs.size(); ++i) {
        const auto& tx = txs[i];
        for (const auto& in : tx.inputs) {
            if (!shards.contains(shard_key(in.prevout.txid, k))) return RejectReason::kMissingShard;
        }
        auto check = validate_transaction(tx, lookup);
        if (!check.ok()) return check.reason;
        if (fees > std::numeric_limits<std::uint64_t>::max() - check.fee) return RejectReason::kValueOverflow;
        fees += check.fee;
        for (const auto& in : tx.inputs) shards.at(shard_key(in.prevout.txid, k)).remove(in.prevout);
        for (const auto& coin : coins_created_by(tx, txid(tx))) {
            if (auto r = insert(coin); r != RejectReason::kNone) return r;
        }
    }
    std::uint64_t reward = 0;
    for (const auto& o : txs.front().outputs) {
        if (o.kind != OutputKind::kPayToPubkeyHash) continue;
        if (reward > std::numeric_limits<std::uint64_t>::max() - o.value) return RejectReason::kValueOverflow;
        reward += o.value;
    }
    const auto subsidy = config_.chain.subsidy;
    if (subsidy > std::numeric_limits<std::uint64_t>::max() - fees || reward > subsidy + fees) {
        return RejectReason::kBadCoinbase;
    }

    Digest32 root;
    if (shards.size() == total_leaves) {
        // Everything is here, so a rebalance can be replayed.
        std::uint64_t total_bytes = 0;
        for (const auto& [idx, shard] : shards) total_bytes += shard.data_size();
        const auto new_k = rebalanced_k(total_bytes, k, config_.chain.sharding.size_cap);
        std::vector<Shard> layout;
        if (new_k != k) {
            std::vector<Coin> everything;
            for (const auto& [idx, shard] : shards) everything.insert(everything.end(), shard.coins.begin(), shard.coins.end());
            layout = partition(everything, new_k);
        } else {
            for (auto& [idx, shard] : shards) layout.push_back(std::move(shard));
        }
        std::vector<Digest32> leaves;
        for (const auto& shard : layout) leaves.push_back(shard.leaf_hash());
        root = build_root(leaves);
    } else {
        std::map<std::uint32_t, Digest32> changed;
        for (const auto& [idx, shard] : shards) changed[idx] = shard.leaf_hash();
        root = partial_root(update_in_place(reply.utxo_tree, changed));
    }
    if (root != committed) return RejectReason::kRootMismatch;

    trusted_root = committed;
    cost.shards = static_cast<std::uint32_t>(shards.size());
    block_costs_.push_back(cost);
    return RejectReason::kNone;
}

}  // namespace dietnet
