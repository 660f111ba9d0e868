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

#include "dietnet/full_node.hpp"

#include <algorithm>
#include <limits>

#include "dietnet/merkle.hpp"

namespace dietnet {

namespace {

bool add_overflows(std::uint64_t a, std::uint64_t b) { return a > std::numeric_limits<std::uint64_t>::max() - b; }

bool is_zero_proof(const TxInput& in) {
    return std::all_of(in.public_key.begin(), in.public_key.end(), [](auto b) { return b == 0; }) &&
           std::all_of(in.signature.begin(), in.signature.end(), [](auto b) { return b == 0; });
}

}  // namespace

std::string_view to_string(ConnectStatus status) {
    switch (status) {
        case ConnectStatus::kAccepted: return "accepted";
        case ConnectStatus::kStoredAsBranch: return "stored-as-branch";
        case ConnectStatus::kRejected: return "rejected";
        case ConnectStatus::kDuplicate: return "duplicate";
    }
    return "unknown";
}

TxCheck validate_transaction(const Transaction& tx, const CoinLookup& view) {
    if (tx.inputs.empty() || tx.outputs.empty()) return {RejectReason::kMalformed};
    const auto digest = sighash(tx);
    std::set<OutPoint> seen;
    std::uint64_t in_total = 0;
    for (const auto& in : tx.inputs) {
        if (in.prevout.is_coinbase_marker()) return {RejectReason::kMalformed};
        if (!seen.insert(in.prevout).second) return {RejectReason::kMissingInput};
        auto coin = view(in.prevout);
        if (!coin) return {RejectReason::kMissingInput};
        if (challenge_of(in.public_key) != coin->challenge) return {RejectReason::kOwnershipFailure};
        if (!verify(in.public_key, digest, in.signature)) return {RejectReason::kOwnershipFailure};
        if (add_overflows(in_total, coin->value)) return {RejectReason::kValueOverflow};
        in_total += coin->value;
    }
    std::uint64_t out_total = 0;
    for (const auto& out : tx.outputs) {
        if (add_overflows(out_total, out.value)) return {RejectReason::kValueOverflow};
        out_total += out.value;
    }
    if (out_total > in_total) return {RejectReason::kValueCreation};
    return {RejectReason::kNone, in_total - out_total};
}

FullNode::FullNode(ChainParams params, const Block& genesis) : params_{params}, utxo_{params.sharding} {
    const auto& h = genesis.header;
    if (!h.prev_hash.is_zero() || h.height != 0) throw ParamError("genesis must have zero parent and height 0");
    if (h.target_bits < params_.min_target_bits || !pow_ok(h)) throw ParamError("genesis fails proof of work");
    if (auto r = check_structure(genesis); r != RejectReason::kNone) {
        throw ParamError("genesis is malformed: " + std::string(to_string(r)));
    }
    auto result = utxo_.apply_block(genesis, 0);
    if (params_.check_utxo_commitment && genesis.committed_utxo_root() != result.root) {
        throw ParamError("genesis commits the wrong UTXO root");
    }
    auto hash = header_hash(h);
    entries_.emplace(hash, Entry{genesis, block_work(h.target_bits)});
    active_.push_back(hash);
}

RejectReason FullNode::validate_header(const BlockHeader& header) const {
    if (header.target_bits < params_.min_target_bits || !pow_ok(header)) return RejectReason::kPowFailure;
    if (header.height == 0 && header.prev_hash.is_zero()) {
        return header_hash(header) == genesis_hash() ? RejectReason::kNone : RejectReason::kBadGenesis;
    }
    auto parent = entries_.find(header.prev_hash);
    if (parent == entries_.end()) return RejectReason::kUnknownParent;
    if (header.height != parent->second.block.header.height + 1) return RejectReason::kBadHeight;
    return RejectReason::kNone;
}

RejectReason FullNode::check_structure(const Block& block) const {
    const auto& txs = block.transactions;
    if (txs.empty() || !txs.front().is_coinbase()) return RejectReason::kBadCoinbase;
    const auto& coinbase = txs.front();
    if (coinbase.version != block.header.height || !is_zero_proof(coinbase.inputs.front())) {
        return RejectReason::kBadCoinbase;
    }
    if (params_.check_utxo_commitment) {
        auto commitments = std::count_if(coinbase.outputs.begin(), coinbase.outputs.end(),
                                         [](const auto& o) { return o.kind == OutputKind::kCommitment; });
        if (commitments != 1) return RejectReason::kBadCoinbase;
    }
    for (std::size_t i = 1; i < txs.size(); ++i) {
        for (const auto& in : txs[i].inputs) {
            if (in.prevout.is_coinbase_marker()) return RejectReason::kMalformed;
        }
    }
    if (tx_merkle_root(txs) != block.header.tx_mroot) return RejectReason::kTxRootMismatch;
    return RejectReason::kNone;
}

CoinLookup FullNode::view() const {
    return [this](const OutPoint& op) { return utxo_.find(op); };
}

RejectReason FullNode::extend_tip(const Block& block) {
    const auto height = block.header.height;
    const auto& txs = block.transactions;

    if (!skip_tx_validation_) {
        std::map<OutPoint, Coin> created;
        std::set<OutPoint> spent;
        CoinLookup lookup = [&](const OutPoint& op) -> std::optional<Coin> {
            if (spent.contains(op)) return std::nullopt;
            if (auto it = created.find(op); it != created.end()) return it->second;
            return utxo_.find(op);
        };
        std::uint64_t fees = 0;
        for (std::size_t i = 1; i < txs.size(); ++i) {
            auto check = validate_transaction(txs[i], lookup);
            if (!check.ok()) return check.reason;
            if (add_overflows(fees, check.fee)) return RejectReason::kValueOverflow;
            fees += check.fee;
            for (const auto& in : txs[i].inputs) {
                created.erase(in.prevout);
                spent.insert(in.prevout);
            }
            for (const auto& coin : coins_created_by(txs[i], txid(txs[i]))) created.emplace(coin.outpoint, coin);
        }
        std::uint64_t reward = 0;
        for (const auto& out : txs.front().outputs) {
            if (out.kind != OutputKind::kPayToPubkeyHash) continue;
            if (add_overflows(reward, out.value)) return RejectReason::kValueOverflow;
            reward += out.value;
        }
        if (add_overflows(params_.subsidy, fees) || reward > params_.subsidy + fees) return RejectReason::kBadCoinbase;
    }

    ApplyResult result;
    try {
        result = utxo_.apply_block(block, height, apply_mode(), forged_next_);
    } catch (const InconsistentStateError&) {
        return RejectReason::kMissingInput;
    }
    if (params_.check_utxo_commitment && block.committed_utxo_root() != result.root) {
        utxo_.rewind_to(height - 1);
        return RejectReason::kUtxoRootMismatch;
    }
    forged_next_.clear();
    active_.push_back(header_hash(block.header));
    prune_mempool();
    return RejectReason::kNone;
}

void FullNode::prune_mempool() {
    std::erase_if(mempool_, [this](const Transaction& tx) {
        return std::any_of(tx.inputs.begin(), tx.inputs.end(),
                           [this](const TxInput& in) { return !utxo_.find(in.prevout).has_value(); });
    });
}

ConnectResult FullNode::connect_block(const Block& block) {
    const auto hash = header_hash(block.header);
    if (entries_.contains(hash)) return {ConnectStatus::kDuplicate};
    if (invalid_.contains(hash)) return {ConnectStatus::kRejected, RejectReason::kDuplicate};

    if (auto r = validate_header(block.header); r != RejectReason::kNone) return {ConnectStatus::kRejected, r};
    if (auto r = check_structure(block); r != RejectReason::kNone) {
        invalid_.insert(hash);
        return {ConnectStatus::kRejected, r};
    }

    Work work = entries_.at(block.header.prev_hash).work + block_work(block.header.target_bits);
    const bool extends_tip = block.header.prev_hash == tip();
    const bool heavier = work > tip_work();
    entries_.emplace(hash, Entry{block, std::move(work)});

    if (extends_tip) {
        if (auto r = extend_tip(block); r != RejectReason::kNone) {
            entries_.erase(hash);
            invalid_.insert(hash);
            return {ConnectStatus::kRejected, r};
        }
        return {ConnectStatus::kAccepted};
    }
    if (heavier) return try_reorg(hash);
    return {ConnectStatus::kStoredAsBranch};
}

ConnectResult FullNode::try_reorg(const Digest32& new_tip) {
    std::vector<Digest32> path;
    for (auto h = new_tip; !on_active_chain(h); h = entries_.at(h).block.header.prev_hash) path.push_back(h);
    std::reverse(path.begin(), path.end());
    const auto fork_height = entries_.at(path.front()).block.header.height - 1;
    const std::vector<Digest32> old_path(active_.begin() + fork_height + 1, active_.end());

    utxo_.rewind_to(fork_height);
    active_.resize(fork_height + 1);
    for (std::size_t i = 0; i < path.size(); ++i) {
        auto r = extend_tip(entries_.at(path[i]).block);
        if (r == RejectReason::kNone) continue;

        for (std::size_t j = i; j < path.size(); ++j) {
            invalid_.insert(path[j]);
            entries_.erase(path[j]);
        }
        utxo_.rewind_to(fork_height);
        active_.resize(fork_height + 1);
        for (const auto& h : old_path) {
            if (extend_tip(entries_.at(h).block) != RejectReason::kNone) {
                throw InconsistentStateError("previously valid block failed on replay");
            }
        }
        return {ConnectStatus::kRejected, r};
    }
    return {ConnectStatus::kAccepted};
}

const Block* FullNode::find_block(const Digest32& hash) const {
    auto it = entries_.find(hash);
    return it == entries_.end() ? nullptr : &it->second.block;
}

bool FullNode::on_active_chain(const Digest32& hash) const {
    auto it = entries_.find(hash);
    if (it == entries_.end()) return false;
    auto height = it->second.block.header.height;
    return height < active_.size() && active_[height] == hash;
}

MerkleBlocksReply FullNode::serve_query_merkle_blocks(const Digest32& since, const BloomFilter& filter) const {
    MerkleBlocksReply reply;
    std::uint32_t start = on_active_chain(since) ? entries_.at(since).block.header.height + 1 : 0;
    for (auto height = start; height < active_.size(); ++height) {
        const auto& block = block_at(height);
        reply.headers.push_back(block.header);

        std::set<std::uint32_t> hits;
        for (std::uint32_t i = 0; i < block.transactions.size(); ++i) {
            const auto& tx = block.transactions[i];
            bool hit = std::any_of(tx.inputs.begin(), tx.inputs.end(),
                                   [&](const TxInput& in) { return filter.contains(in.public_key); });
            hit = hit || std::any_of(tx.outputs.begin(), tx.outputs.end(), [&](const TxOutput& out) {
                      return out.kind == OutputKind::kPayToPubkeyHash && filter.contains(out.payload.span());
                  });
            if (hit) hits.insert(i);
        }
        if (hits.empty()) continue;

        MerkleBlockMatch match;
        match.header = block.header;
        match.tx_tree = extract_partial(txids_of(block.transactions), hits);
        for (auto i : hits) match.txs.push_back(block.transactions[i]);
        reply.matches.push_back(std::move(match));
    }
    return reply;
}

Digest32 FullNode::serve_query_utxo_mroot(const Digest32& block_hash) const {
    if (!on_active_chain(block_hash)) throw QueryError(RejectReason::kUnknownBlock);
    auto root = entries_.at(block_hash).block.committed_utxo_root();
    if (!root) throw QueryError(RejectReason::kHistoryUnavailable, "block carries no UTXO commitment");
    return *root;
}

const Block& FullNode::serve_query_block(const Digest32& block_hash) const {
    if (!on_active_chain(block_hash)) throw QueryError(RejectReason::kUnknownBlock);
    return entries_.at(block_hash).block;
}

std::set<std::uint32_t> FullNode::touched_shards(std::uint32_t height) const {
    const auto k = utxo_.k_before(height);
    std::set<std::uint32_t> touched;
    if (utxo_.k_before(height + 1) != k) {
        // The block rebalanced: the verifier needs every coin to repartition.
        for (std::uint32_t i = 0; i < (std::uint32_t{1} << k); ++i) touched.insert(i);
        return touched;
    }
    const auto& parent_coinbase = block_at(height - 1).transactions.front();
    if (!coins_created_by(parent_coinbase, {}).empty()) touched.insert(shard_key(txid(parent_coinbase), k));
    const auto& txs = block_at(height).transactions;
    for (std::size_t i = 1; i < txs.size(); ++i) {
        for (const auto& in : txs[i].inputs) touched.insert(shard_key(in.prevout.txid, k));
        if (!coins_created_by(txs[i], {}).empty()) touched.insert(shard_key(txid(txs[i]), k));
    }
    if (touched.empty()) touched.insert(0);
    return touched;
}

UtxosReply FullNode::serve_query_utxos(const Digest32& block_hash) const {
    if (!on_active_chain(block_hash)) throw QueryError(RejectReason::kUnknownBlock);
    const auto height = entries_.at(block_hash).block.header.height;
    if (height == 0) throw QueryError(RejectReason::kHistoryUnavailable, "no UTXO state before genesis");

    UtxosReply reply;
    try {
        auto snap = utxo_.state_before(height, touched_shards(height));
        reply.utxo_tree = std::move(snap.proof);
        reply.shards = std::move(snap.shards);
    } catch (const HistoryUnavailableError& e) {
        throw QueryError(RejectReason::kHistoryUnavailable, e.what());
    }
    const auto& parent = block_at(height - 1);
    reply.parent_coinbase = parent.transactions.front();
    reply.parent_coinbase_proof = extract_partial(txids_of(parent.transactions), {0});
    return reply;
}

Bytes FullNode::handle_query(MsgType type, ByteSpan payload) const {
    try {
        switch (type) {
            case MsgType::kQueryMerkleBlocks: {
                auto q = decode_merkle_blocks_query(payload);
                return encode(serve_query_merkle_blocks(q.since, q.filter));
            }
            case MsgType::kQueryUtxoMRoot:
                return encode_root_reply(serve_query_utxo_mroot(decode_hash_query(payload)));
            case MsgType::kQueryBlock:
                return encode_block_reply(serve_query_block(decode_hash_query(payload)));
            case MsgType::kQueryUtxos:
                return encode(serve_query_utxos(decode_hash_query(payload)));
            default:
                return encode_error_reply(RejectReason::kMalformed);
        }
    } catch (const QueryError& e) {
        return encode_error_reply(e.reason());
    } catch (const DecodeError&) {
        return encode_error_reply(RejectReason::kMalformed);
    }
}

Digest32 FullNode::preview_commitment(std::span<const Transaction> txs) const {
    return utxo_.preview(txs, apply_mode(), forged_next_).root;
}

}  // namespace dietnet
