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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "dietnet/bytes.hpp"
#include "dietnet/chain.hpp"
#include "dietnet/merkle.hpp"

namespace dietnet {

//! An unspent pay-to-pubkey-hash output.
struct Coin {
    OutPoint outpoint;
    std::uint64_t value{0};
    Digest32 challenge;

    friend auto operator<=>(const Coin&, const Coin&) = default;
};

// txid(32) | index(4) | value(8) | challenge(32)
inline constexpr std::size_t kCoinEncodedSize = 76;

//! The first k bits of txid, byte 0 first, most significant bit first. k must be <= 32.
[[nodiscard]] std::uint32_t shard_key(const Digest32& txid, unsigned k);

//! Coins created by a transaction's spendable outputs.
[[nodiscard]] std::vector<Coin> coins_created_by(const Transaction& tx, const Digest32& id);

/**
 * Coins whose txid shares a k-bit prefix, kept sorted by outpoint so equal sets encode
 * identically. Wire form: u16 count, then each coin in ascending order.
 */
struct Shard {
    std::vector<Coin> coins;

    //! False when the outpoint is already present.
    bool insert(const Coin& coin);
    std::optional<Coin> remove(const OutPoint& outpoint);
    [[nodiscard]] const Coin* find(const OutPoint& outpoint) const;

    //! Coin payload bytes; the figure the size cap is measured against.
    [[nodiscard]] std::size_t data_size() const { return coins.size() * kCoinEncodedSize; }
    [[nodiscard]] Bytes encode() const;
    //! hash256(encode()), except that an empty shard hashes the empty byte string.
    [[nodiscard]] Digest32 leaf_hash() const;

    friend bool operator==(const Shard&, const Shard&) = default;
};

void write(Writer& w, const Shard& shard);
//! Rejects coins out of order or duplicated.
[[nodiscard]] Shard read_shard(Reader& r);
[[nodiscard]] Shard decode_shard(ByteSpan data);

//! Spreads coins over 2^k shards by shard_key.
[[nodiscard]] std::vector<Shard> partition(std::span<const Coin> coins, unsigned k);

struct ShardingPolicy {
    unsigned k{0};
    std::size_t size_cap{1024};
};

//! Smallest k' >= k with total_bytes / 2^k' <= cap.
[[nodiscard]] unsigned rebalanced_k(std::uint64_t total_bytes, unsigned k, std::size_t cap);

struct RebalanceEvent {
    std::uint32_t height{0};
    unsigned k_from{0};
    unsigned k_to{0};
    std::uint64_t total_bytes{0};
    std::uint64_t avg_before{0};
    std::uint64_t avg_after{0};
};

struct ApplyResult {
    Digest32 root;
    std::set<std::uint32_t> changed;
    std::optional<RebalanceEvent> rebalance;
};

//! Strict is for honest nodes. Lenient skips missing spends, which only a forging node wants.
enum class ApplyMode { kStrict, kLenient };

//! Shards as they stood before some block, with a proof against the parent's committed root.
struct ShardSnapshot {
    unsigned k{0};
    std::map<std::uint32_t, Shard> shards;
    PartialMerkleTree proof;
};

/**
 * The sharded UTXO set with per-height history.
 *
 * The root committed by block h covers the state after h's non-coinbase transactions (and any
 * rebalance). The coinbase's own outputs are held as pending and enter the shards at the start
 * of block h+1, so the committed root never depends on the coinbase that carries it.
 * Single writer; reads may run concurrently with each other.
 */
class VersionedShardStore {
  public:
    explicit VersionedShardStore(ShardingPolicy policy = {});

    /**
     * Applies a block whose transactions have already been validated. height must be the next
     * height (0 for the first block). In strict mode a missing spend or duplicate coin throws
     * InconsistentStateError. `forged` coins are inserted after the transactions and before the
     * root is computed.
     */
    ApplyResult apply_block(const Block& block, std::uint32_t height, ApplyMode mode = ApplyMode::kStrict,
                            std::span<const Coin> forged = {});

    //! Root the next block would commit if it carried these non-coinbase transactions.
    [[nodiscard]] ApplyResult preview(std::span<const Transaction> txs, ApplyMode mode = ApplyMode::kStrict,
                                      std::span<const Coin> forged = {}) const;

    //! Throws HistoryUnavailableError when no state before `height` is held.
    [[nodiscard]] ShardSnapshot state_before(std::uint32_t height, const std::set<std::uint32_t>& shards) const;
    [[nodiscard]] unsigned k_before(std::uint32_t height) const;
    //! Every committed coin before `height`.
    [[nodiscard]] std::vector<Coin> coins_before(std::uint32_t height) const;
    [[nodiscard]] std::uint64_t total_bytes_before(std::uint32_t height) const;

    //! Discards everything applied above `height`.
    void rewind_to(std::uint32_t height);

    [[nodiscard]] const Digest32& utxo_root() const { return root_; }
    [[nodiscard]] std::optional<Digest32> root_at(std::uint32_t height) const;
    [[nodiscard]] std::optional<std::uint32_t> tip_height() const { return tip_; }
    [[nodiscard]] unsigned k() const { return k_; }
    [[nodiscard]] const ShardingPolicy& policy() const { return policy_; }
    [[nodiscard]] const std::vector<Shard>& shards() const { return shards_; }
    [[nodiscard]] std::span<const Coin> pending_coins() const { return pending_; }
    [[nodiscard]] std::vector<Coin> committed_coins() const;
    //! Committed plus pending: everything spendable by the next block.
    [[nodiscard]] std::vector<Coin> all_coins() const;
    [[nodiscard]] std::optional<Coin> find(const OutPoint& outpoint) const;

    [[nodiscard]] std::uint64_t total_bytes() const;
    [[nodiscard]] std::uint64_t average_shard_size() const { return total_bytes() >> k_; }
    [[nodiscard]] const std::vector<RebalanceEvent>& rebalance_log() const { return rebalance_log_; }

  private:
    struct Version {
        Shard shard;
        Digest32 leaf;
    };

    struct WorkingSet {
        unsigned k;
        std::vector<Shard> shards;
    };

    ApplyResult commit(WorkingSet& ws, std::span<const Transaction> txs, std::span<const Coin> carried,
                       ApplyMode mode, std::span<const Coin> forged, std::uint32_t height) const;
    [[nodiscard]] const Version& version_at(unsigned k, std::uint32_t index, std::uint32_t height) const;

    ShardingPolicy policy_;
    unsigned k_;
    std::vector<Shard> shards_;
    std::vector<Digest32> leaves_;
    std::vector<Coin> pending_;
    Digest32 root_;
    std::optional<std::uint32_t> tip_;

    std::map<std::pair<unsigned, std::uint32_t>, std::map<std::uint32_t, Version>> versions_;
    std::map<std::uint32_t, unsigned> k_log_;
    std::map<std::uint32_t, Digest32> root_log_;
    std::map<std::uint32_t, std::vector<Coin>> pending_log_;
    std::vector<RebalanceEvent> rebalance_log_;
};

}  // namespace dietnet
