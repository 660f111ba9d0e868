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

#include "dietnet/utxo_store.hpp"

#include <algorithm>

#include "dietnet/codec.hpp"
#include "dietnet/crypto.hpp"
#include "dietnet/errors.hpp"

namespace dietnet {

namespace {

constexpr unsigned kMaxK = 32;

auto by_outpoint = [](const Coin& coin, const OutPoint& op) { return coin.outpoint < op; };

}  // namespace

std::uint32_t shard_key(const Digest32& txid, unsigned k) {
    if (k > kMaxK) throw ParamError("shard prefix length must be in [0, 32], got " + std::to_string(k));
    std::uint64_t prefix = 0;
    for (int i = 0; i < 4; ++i) prefix = (prefix << 8) | txid.bytes[i];
    return k == 0 ? 0 : static_cast<std::uint32_t>(prefix >> (32 - k));
}

std::vector<Coin> coins_created_by(const Transaction& tx, const Digest32& id) {
    std::vector<Coin> coins;
    for (std::uint32_t j = 0; j < tx.outputs.size(); ++j) {
        const auto& out = tx.outputs[j];
        if (out.kind != OutputKind::kPayToPubkeyHash) continue;
        coins.push_back(Coin{OutPoint{id, j}, out.value, out.payload});
    }
    return coins;
}

bool Shard::insert(const Coin& coin) {
    auto it = std::lower_bound(coins.begin(), coins.end(), coin.outpoint, by_outpoint);
    if (it != coins.end() && it->outpoint == coin.outpoint) return false;
    coins.insert(it, coin);
    return true;
}

std::optional<Coin> Shard::remove(const OutPoint& outpoint) {
    auto it = std::lower_bound(coins.begin(), coins.end(), outpoint, by_outpoint);
    if (it == coins.end() || it->outpoint != outpoint) return std::nullopt;
    Coin coin = *it;
    coins.erase(it);
    return coin;
}

const Coin* Shard::find(const OutPoint& outpoint) const {
    auto it = std::lower_bound(coins.begin(), coins.end(), outpoint, by_outpoint);
    if (it == coins.end() || it->outpoint != outpoint) return nullptr;
    return &*it;
}

Bytes Shard::encode() const {
    Writer w;
    write(w, *this);
    return std::move(w).take();
}

Digest32 Shard::leaf_hash() const {
    if (coins.empty()) return hash256(ByteSpan{});
    return hash256(encode());
}

void write(Writer& w, const Shard& shard) {
    w.count16(shard.coins.size(), "coins in shard");
    for (const auto& coin : shard.coins) {
        w.digest(coin.outpoint.txid);
        w.u32(coin.outpoint.index);
        w.u64(coin.value);
        w.digest(coin.challenge);
    }
}

Shard read_shard(Reader& r) {
    Shard shard;
    auto n = r.u16();
    shard.coins.reserve(n);
    for (std::uint16_t i = 0; i < n; ++i) {
        Coin coin;
        coin.outpoint.txid = r.digest();
        coin.outpoint.index = r.u32();
        coin.value = r.u64();
        coin.challenge = r.digest();
        if (!shard.coins.empty() && !(shard.coins.back().outpoint < coin.outpoint)) {
            r.fail("shard coins not strictly ascending");
        }
        shard.coins.push_back(coin);
    }
    return shard;
}

Shard decode_shard(ByteSpan data) {
    Reader r(data);
    auto shard = read_shard(r);
    r.expect_end();
    return shard;
}

std::vector<Shard> partition(std::span<const Coin> coins, unsigned k) {
    if (k > kMaxK) throw ParamError("shard prefix length must be in [0, 32]");
    std::vector<Shard> shards(std::size_t{1} << k);
    std::vector<Coin> sorted(coins.begin(), coins.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& coin : sorted) shards[shard_key(coin.outpoint.txid, k)].coins.push_back(coin);
    return shards;
}

unsigned rebalanced_k(std::uint64_t total_bytes, unsigned k, std::size_t cap) {
    if (cap == 0) throw ParamError("shard size cap must be positive");
    // total > cap * 2^k without overflow: compare the quotient, then the remainder
    auto over = [&](unsigned bits) {
        const auto q = total_bytes >> bits;
        const auto rem = total_bytes & ((std::uint64_t{1} << bits) - 1);
        return q > cap || (q == cap && rem != 0);
    };
    while (k < kMaxK && over(k)) ++k;
    return k;
}

namespace {

const ShardingPolicy& checked(const ShardingPolicy& policy) {
    if (policy.k > kMaxK) throw ParamError("initial k must be in [0, 32]");
    if (policy.size_cap == 0) throw ParamError("shard size cap must be positive");
    return policy;
}

}  // namespace

VersionedShardStore::VersionedShardStore(ShardingPolicy policy)
    : policy_{checked(policy)}, k_{policy.k}, shards_(std::size_t{1} << policy.k) {
    leaves_.assign(shards_.size(), hash256(ByteSpan{}));
    root_ = build_root(leaves_);
}

ApplyResult VersionedShardStore::commit(WorkingSet& ws, std::span<const Transaction> txs,
                                        std::span<const Coin> carried, ApplyMode mode,
                                        std::span<const Coin> forged, std::uint32_t height) const {
    ApplyResult result;
    const bool strict = mode == ApplyMode::kStrict;
    auto add = [&](const Coin& coin) {
        auto idx = shard_key(coin.outpoint.txid, ws.k);
        if (!ws.shards[idx].insert(coin) && strict) {
            throw InconsistentStateError("coin " + coin.outpoint.txid.hex() + ":" +
                                         std::to_string(coin.outpoint.index) + " already present");
        }
        result.changed.insert(idx);
    };

    for (const auto& coin : carried) add(coin);
    for (const auto& tx : txs) {
        for (const auto& in : tx.inputs) {
            auto idx = shard_key(in.prevout.txid, ws.k);
            if (!ws.shards[idx].remove(in.prevout)) {
                if (strict) {
                    throw InconsistentStateError("spent coin " + in.prevout.txid.hex() + ":" +
                                                 std::to_string(in.prevout.index) + " is not in the UTXO set");
                }
                continue;
            }
            result.changed.insert(idx);
        }
        for (const auto& coin : coins_created_by(tx, txid(tx))) add(coin);
    }
    for (const auto& coin : forged) add(coin);

    std::uint64_t total = 0;
    for (const auto& shard : ws.shards) total += shard.data_size();
    auto new_k = rebalanced_k(total, ws.k, policy_.size_cap);
    if (new_k != ws.k) {
        std::vector<Coin> everything;
        for (auto& shard : ws.shards) everything.insert(everything.end(), shard.coins.begin(), shard.coins.end());
        result.rebalance = RebalanceEvent{height, ws.k, new_k, total, total >> ws.k, total >> new_k};
        ws.k = new_k;
        ws.shards = partition(everything, new_k);
        result.changed.clear();
        for (std::uint32_t i = 0; i < ws.shards.size(); ++i) result.changed.insert(i);
    }

    std::vector<Digest32> leaves;
    leaves.reserve(ws.shards.size());
    for (const auto& shard : ws.shards) leaves.push_back(shard.leaf_hash());
    result.root = build_root(leaves);
    return result;
}

ApplyResult VersionedShardStore::apply_block(const Block& block, std::uint32_t height, ApplyMode mode,
                                             std::span<const Coin> forged) {
    const std::uint32_t expected = tip_ ? *tip_ + 1 : 0;
    if (height != expected) {
        throw InconsistentStateError("apply_block at height " + std::to_string(height) + ", expected " +
                                     std::to_string(expected));
    }
    if (block.transactions.empty() || !block.transactions.front().is_coinbase()) {
        throw ParamError("block must start with a coinbase transaction");
    }

    WorkingSet ws{k_, shards_};
    auto txs = std::span<const Transaction>(block.transactions).subspan(1);
    auto result = commit(ws, txs, pending_, mode, forged, height);
    if (!tip_) {
        for (std::uint32_t i = 0; i < ws.shards.size(); ++i) result.changed.insert(i);
    }

    k_ = ws.k;
    shards_ = std::move(ws.shards);
    leaves_.resize(shards_.size());
    for (std::uint32_t i = 0; i < shards_.size(); ++i) {
        if (result.changed.contains(i)) {
            leaves_[i] = shards_[i].leaf_hash();
            versions_[{k_, i}][height] = Version{shards_[i], leaves_[i]};
        }
    }
    root_ = result.root;
    tip_ = height;
    k_log_[height] = k_;
    root_log_[height] = root_;
    if (result.rebalance) rebalance_log_.push_back(*result.rebalance);

    const auto& coinbase = block.transactions.front();
    pending_ = coins_created_by(coinbase, txid(coinbase));
    pending_log_[height] = pending_;
    return result;
}

ApplyResult VersionedShardStore::preview(std::span<const Transaction> txs, ApplyMode mode,
                                         std::span<const Coin> forged) const {
    WorkingSet ws{k_, shards_};
    return commit(ws, txs, pending_, mode, forged, tip_ ? *tip_ + 1 : 0);
}

const VersionedShardStore::Version& VersionedShardStore::version_at(unsigned k, std::uint32_t index,
                                                                    std::uint32_t height) const {
    auto it = versions_.find({k, index});
    if (it != versions_.end()) {
        auto v = it->second.upper_bound(height);
        if (v != it->second.begin()) return std::prev(v)->second;
    }
    throw HistoryUnavailableError("no version of shard " + std::to_string(index) + " at height " +
                                  std::to_string(height));
}

unsigned VersionedShardStore::k_before(std::uint32_t height) const {
    if (height == 0 || !tip_ || height > *tip_ + 1) {
        throw HistoryUnavailableError("no UTXO state before height " + std::to_string(height));
    }
    return k_log_.at(height - 1);
}

ShardSnapshot VersionedShardStore::state_before(std::uint32_t height, const std::set<std::uint32_t>& shards) const {
    ShardSnapshot snap;
    snap.k = k_before(height);
    const std::uint32_t width = std::uint32_t{1} << snap.k;
    std::vector<Digest32> leaves;
    leaves.reserve(width);
    for (std::uint32_t i = 0; i < width; ++i) {
        const auto& v = version_at(snap.k, i, height - 1);
        leaves.push_back(v.leaf);
        if (shards.contains(i)) snap.shards.emplace(i, v.shard);
    }
    snap.proof = extract_partial(leaves, shards);
    return snap;
}

std::vector<Coin> VersionedShardStore::coins_before(std::uint32_t height) const {
    const auto k = k_before(height);
    std::vector<Coin> coins;
    for (std::uint32_t i = 0; i < (std::uint32_t{1} << k); ++i) {
        const auto& v = version_at(k, i, height - 1);
        coins.insert(coins.end(), v.shard.coins.begin(), v.shard.coins.end());
    }
    return coins;
}

std::uint64_t VersionedShardStore::total_bytes_before(std::uint32_t height) const {
    return coins_before(height).size() * kCoinEncodedSize;
}

void VersionedShardStore::rewind_to(std::uint32_t height) {
    if (!tip_ || height > *tip_) throw HistoryUnavailableError("cannot rewind to height " + std::to_string(height));
    for (auto& [key, history] : versions_) history.erase(history.upper_bound(height), history.end());
    k_log_.erase(k_log_.upper_bound(height), k_log_.end());
    root_log_.erase(root_log_.upper_bound(height), root_log_.end());
    pending_log_.erase(pending_log_.upper_bound(height), pending_log_.end());
    std::erase_if(rebalance_log_, [&](const RebalanceEvent& e) { return e.height > height; });

    k_ = k_log_.at(height);
    shards_.assign(std::size_t{1} << k_, Shard{});
    leaves_.assign(shards_.size(), Digest32{});
    for (std::uint32_t i = 0; i < shards_.size(); ++i) {
        const auto& v = version_at(k_, i, height);
        shards_[i] = v.shard;
        leaves_[i] = v.leaf;
    }
    root_ = root_log_.at(height);
    pending_ = pending_log_.at(height);
    tip_ = height;
}

std::optional<Digest32> VersionedShardStore::root_at(std::uint32_t height) const {
    if (auto it = root_log_.find(height); it != root_log_.end()) return it->second;
    return std::nullopt;
}

std::vector<Coin> VersionedShardStore::committed_coins() const {
    std::vector<Coin> coins;
    for (const auto& shard : shards_) coins.insert(coins.end(), shard.coins.begin(), shard.coins.end());
    return coins;
}

std::vector<Coin> VersionedShardStore::all_coins() const {
    auto coins = committed_coins();
    coins.insert(coins.end(), pending_.begin(), pending_.end());
    std::sort(coins.begin(), coins.end());
    return coins;
}

std::optional<Coin> VersionedShardStore::find(const OutPoint& outpoint) const {
    if (const auto* coin = shards_[shard_key(outpoint.txid, k_)].find(outpoint)) return *coin;
    for (const auto& coin : pending_) {
        if (coin.outpoint == outpoint) return coin;
    }
    return std::nullopt;
}

std::uint64_t VersionedShardStore::total_bytes() const {
    std::uint64_t total = 0;
    for (const auto& shard : shards_) total += shard.data_size();
    return total;
}

}  // namespace dietnet
