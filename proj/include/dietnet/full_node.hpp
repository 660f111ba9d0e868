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
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dietnet/bloom.hpp"
#include "dietnet/chain.hpp"
#include "dietnet/errors.hpp"
#include "dietnet/protocol.hpp"
#include "dietnet/utxo_store.hpp"

namespace dietnet {

struct ChainParams {
    //! Headers must carry at least this many target bits.
    std::uint8_t min_target_bits{8};
    std::uint64_t subsidy{50};
    ShardingPolicy sharding{};
    //! False models a legacy node: the coinbase commitment is carried but never checked.
    bool check_utxo_commitment{true};
};

using CoinLookup = std::function<std::optional<Coin>(const OutPoint&)>;

struct TxCheck {
    RejectReason reason{RejectReason::kNone};
    std::uint64_t fee{0};

    [[nodiscard]] bool ok() const { return reason == RejectReason::kNone; }
};

//! Existence (no double spend), ownership and value conservation for a non-coinbase transaction.
[[nodiscard]] TxCheck validate_transaction(const Transaction& tx, const CoinLookup& view);

enum class ConnectStatus { kAccepted, kStoredAsBranch, kRejected, kDuplicate };

struct ConnectResult {
    ConnectStatus status{ConnectStatus::kRejected};
    RejectReason reason{RejectReason::kNone};

    [[nodiscard]] bool accepted() const { return status == ConnectStatus::kAccepted; }
};

[[nodiscard]] std::string_view to_string(ConnectStatus status);

/**
 * A validating node: header and block checks, fork choice by cumulative work, the versioned
 * UTXO store for the active branch, and the query services light clients call.
 *
 * Only the active branch has UTXO state. When a side branch becomes heavier the store is
 * rewound to the fork point and the branch replayed; a failure on the way restores the old tip.
 */
class FullNode {
  public:
    //! Throws ParamError when genesis is not a valid height-0 block.
    FullNode(ChainParams params, const Block& genesis);

    [[nodiscard]] RejectReason validate_header(const BlockHeader& header) const;
    ConnectResult connect_block(const Block& block);

    // Query services. Errors surface as QueryError.
    [[nodiscard]] MerkleBlocksReply serve_query_merkle_blocks(const Digest32& since, const BloomFilter& filter) const;
    [[nodiscard]] Digest32 serve_query_utxo_mroot(const Digest32& block_hash) const;
    [[nodiscard]] const Block& serve_query_block(const Digest32& block_hash) const;
    [[nodiscard]] UtxosReply serve_query_utxos(const Digest32& block_hash) const;
    //! Shard indices (under the parent's k) a block reads or writes.
    [[nodiscard]] std::set<std::uint32_t> touched_shards(std::uint32_t height) const;

    //! Decodes a query, serves it, and encodes the reply (errors become status bytes).
    [[nodiscard]] Bytes handle_query(MsgType type, ByteSpan payload) const;

    [[nodiscard]] const Digest32& tip() const { return active_.back(); }
    [[nodiscard]] std::uint32_t tip_height() const { return static_cast<std::uint32_t>(active_.size() - 1); }
    [[nodiscard]] const Work& tip_work() const { return entries_.at(tip()).work; }
    [[nodiscard]] const std::vector<Digest32>& active_chain() const { return active_; }
    [[nodiscard]] const Block& block_at(std::uint32_t height) const { return entries_.at(active_.at(height)).block; }
    [[nodiscard]] const Block* find_block(const Digest32& hash) const;
    [[nodiscard]] bool on_active_chain(const Digest32& hash) const;
    [[nodiscard]] const VersionedShardStore& utxo() const { return utxo_; }
    [[nodiscard]] const ChainParams& params() const { return params_; }
    [[nodiscard]] const Digest32& genesis_hash() const { return active_.front(); }

    //! Lookup over the live UTXO set, including coins pending from the tip's coinbase.
    [[nodiscard]] CoinLookup view() const;

    void submit_transaction(Transaction tx) { mempool_.push_back(std::move(tx)); }
    [[nodiscard]] const std::vector<Transaction>& mempool() const { return mempool_; }

    //! Root the next block on the tip would commit with these transactions.
    [[nodiscard]] Digest32 preview_commitment(std::span<const Transaction> txs) const;

    // Byzantine hooks, used only by adversary nodes in the simulator.
    //! Skip transaction checks and tolerate missing spends when building and connecting blocks.
    void set_skip_tx_validation(bool skip) { skip_tx_validation_ = skip; }
    [[nodiscard]] bool skips_tx_validation() const { return skip_tx_validation_; }
    //! Coins slipped into the UTXO set by the next connected block, before its root is taken.
    void forge_coins_next_block(std::vector<Coin> coins) { forged_next_ = std::move(coins); }
    [[nodiscard]] std::span<const Coin> forged_next() const { return forged_next_; }

  private:
    struct Entry {
        Block block;
        Work work;
    };

    [[nodiscard]] RejectReason check_structure(const Block& block) const;
    //! Validates the block against the live state and applies it. Store untouched on failure.
    RejectReason extend_tip(const Block& block);
    ConnectResult try_reorg(const Digest32& new_tip);
    void prune_mempool();
    [[nodiscard]] ApplyMode apply_mode() const {
        return skip_tx_validation_ ? ApplyMode::kLenient : ApplyMode::kStrict;
    }

    ChainParams params_;
    std::map<Digest32, Entry> entries_;
    std::set<Digest32> invalid_;
    std::vector<Digest32> active_;
    VersionedShardStore utxo_;
    std::vector<Transaction> mempool_;
    bool skip_tx_validation_{false};
    std::vector<Coin> forged_next_;
};

}  // namespace dietnet
