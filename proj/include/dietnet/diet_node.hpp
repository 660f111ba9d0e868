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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dietnet/chain.hpp"
#include "dietnet/crypto.hpp"
#include "dietnet/errors.hpp"
#include "dietnet/full_node.hpp"
#include "dietnet/protocol.hpp"

namespace dietnet {

//! Synchronous request/response channel to one serving full node.
class Transport {
  public:
    virtual ~Transport() = default;
    //! Returns the encoded reply. May throw QueryError when the message cannot be delivered.
    virtual Bytes request(MsgType type, const Bytes& payload) = 0;
};

//! Calls a full node's query handler in-process.
class DirectTransport final : public Transport {
  public:
    explicit DirectTransport(const FullNode& node) : node_{node} {}
    Bytes request(MsgType type, const Bytes& payload) override { return node_.handle_query(type, payload); }

  private:
    const FullNode& node_;
};

struct DietConfig {
    std::vector<PublicKey> pub_keys;
    //! Blocks at least this deep under the tip are trusted without verification.
    std::uint32_t max_depth{6};
    //! Longest subchain verified in one call (l).
    std::uint32_t max_length{6};
    //! False gives a plain SPV client.
    bool diet_enabled{true};
    //! Difficulty floor, subsidy and shard cap the chain runs with.
    ChainParams chain{};
    std::uint32_t bloom_bits{BloomFilter::kDefaultBits};
    std::uint8_t bloom_hashes{BloomFilter::kDefaultHashes};
};

struct VerificationRange {
    //! Trusted base: its committed root is fetched, not checked.
    std::uint32_t first{0};
    //! Blocks first+1 ..= last are verified.
    std::uint32_t last{0};

    friend bool operator==(const VerificationRange&, const VerificationRange&) = default;
};

/**
 * first = max(highest_verified, tip - max_depth), then max(first, last - max_length).
 * Returns nullopt (fall back to SPV) when first >= last. Differences are taken as signed.
 */
[[nodiscard]] std::optional<VerificationRange> compute_verification_range(std::uint32_t highest_verified,
                                                                          std::uint32_t tip_height,
                                                                          std::uint32_t max_depth,
                                                                          std::uint32_t max_length,
                                                                          std::uint32_t last);

enum class VerdictKind { kSpvOnly, kDietVerified, kRejected };

[[nodiscard]] std::string_view to_string(VerdictKind kind);

struct TxVerdict {
    Digest32 txid;
    std::uint32_t height{0};
    VerdictKind kind{VerdictKind::kSpvOnly};
    //! Set for diet-verified.
    std::optional<VerificationRange> range;
    RejectReason reason{RejectReason::kNone};
    //! Height of the block that failed, for rejected.
    std::uint32_t reject_height{0};
};

struct VerifyOutcome {
    enum class Status { kVerified, kFallback, kRejected };
    Status status{Status::kFallback};
    std::optional<VerificationRange> range;
    RejectReason reason{RejectReason::kNone};
    std::uint32_t height{0};
};

//! Per-block download cost of a verification.
struct BlockCost {
    std::uint32_t height{0};
    std::uint64_t block_bytes{0};
    std::uint64_t utxos_bytes{0};
    std::uint32_t shards{0};
};

struct Bandwidth {
    //! Reply bytes, keyed by reply type.
    std::map<MsgType, std::uint64_t> down;
    //! Query bytes, keyed by query type.
    std::map<MsgType, std::uint64_t> up;
    std::uint64_t messages{0};

    [[nodiscard]] std::uint64_t total_down() const;
};

/**
 * A light client holding only headers. In SPV mode it checks proof of work and transaction
 * inclusion. With diet verification on, it also replays the last few blocks against downloaded
 * UTXO shards and checks each block's committed root, trusting the root of the block just below
 * the verified window.
 */
class DietNode {
  public:
    DietNode(DietConfig config, const BlockHeader& genesis);

    //! Adds headers in order, stopping at the first invalid one. Returns the best tip afterwards.
    const Digest32& verify_headers(const std::vector<BlockHeader>& headers);

    //! One sync round: fetch headers and filtered blocks, check inclusion, verify, report.
    std::vector<TxVerdict> update_chain(Transport& peer);

    //! Fully verifies the subchain ending at `last` on the best chain.
    VerifyOutcome verify_blocks_up_to(Transport& peer, std::uint32_t last);

    [[nodiscard]] const Digest32& tip() const { return active_.back(); }
    [[nodiscard]] std::uint32_t tip_height() const { return static_cast<std::uint32_t>(active_.size() - 1); }
    [[nodiscard]] std::uint32_t highest_verified() const { return highest_verified_; }
    [[nodiscard]] const std::vector<Digest32>& active_chain() const { return active_; }
    [[nodiscard]] const BlockHeader& header_at(std::uint32_t height) const;
    [[nodiscard]] const DietConfig& config() const { return config_; }
    [[nodiscard]] const Bandwidth& bandwidth() const { return bandwidth_; }
    [[nodiscard]] const std::vector<BlockCost>& block_costs() const { return block_costs_; }
    //! Why the last verify_headers call stopped early, if it did.
    [[nodiscard]] RejectReason last_header_reject() const { return last_header_reject_; }
    //! True when the transaction pays or spends one of the configured keys.
    [[nodiscard]] bool concerns_user(const Transaction& tx) const;
    [[nodiscard]] BloomFilter make_filter() const;

  private:
    struct HeaderEntry {
        BlockHeader header;
        Work work;
    };

    Bytes exchange(Transport& peer, MsgType type, const Bytes& payload);
    //! Checks one block against the trusted root and moves the root forward on success.
    RejectReason verify_block(Transport& peer, std::uint32_t height, Digest32& trusted_root);
    void switch_tip(const Digest32& new_tip);

    DietConfig config_;
    std::map<Digest32, HeaderEntry> headers_;
    std::vector<Digest32> active_;
    std::uint32_t highest_verified_{0};
    //! Blocks this node verified, with the window that covered them.
    std::map<Digest32, VerificationRange> verified_by_;
    std::vector<Digest32> user_challenges_;
    Bandwidth bandwidth_;
    std::vector<BlockCost> block_costs_;
    RejectReason last_header_reject_{RejectReason::kNone};
};

}  // namespace dietnet
