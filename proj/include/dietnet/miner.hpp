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
#include <optional>
#include <span>
#include <vector>

#include "dietnet/chain.hpp"
#include "dietnet/full_node.hpp"

namespace dietnet {

struct BlockTemplate {
    Digest32 parent;
    std::uint32_t height{0};
    std::uint8_t target_bits{0};
    std::vector<Transaction> txs;
    PublicKey reward_key{};
};

//! Template on the node's tip holding the candidates that validate in order; the rest are dropped.
[[nodiscard]] BlockTemplate make_template(const FullNode& node, std::span<const Transaction> candidates,
                                          const PublicKey& reward_key, std::uint8_t target_bits);

/**
 * Builds the block with an unsolved header. The coinbase pays subsidy + fees to the reward key
 * in output 0 and commits the UTXO root in output 1. Its version carries the height; the
 * commitment output's value is the extra-nonce. Throws ParamError when the template is stale or
 * two transactions spend the same coin.
 */
[[nodiscard]] Block assemble_block(const BlockTemplate& tmpl, const FullNode& node, std::uint64_t extra_nonce = 0);

//! Tries max_attempts nonces starting at start_nonce. Throws ParamError when max_attempts == 0.
[[nodiscard]] std::optional<std::uint64_t> solve_pow(const BlockHeader& header, std::uint64_t max_attempts,
                                                     std::uint64_t start_nonce);

//! First nonce tried for a block; a pure function of the seed and height.
[[nodiscard]] std::uint64_t start_nonce(std::uint64_t seed, std::uint32_t height);

struct MiningStats {
    std::uint64_t attempts{0};
};

//! assemble + solve, bumping the extra-nonce whenever a nonce window is exhausted.
[[nodiscard]] Block mine_block(const BlockTemplate& tmpl, const FullNode& node, std::uint64_t seed,
                               MiningStats* stats = nullptr, std::uint64_t window = std::uint64_t{1} << 24);

//! Height-0 block paying the subsidy to reward_key and committing the empty UTXO set.
[[nodiscard]] Block mine_genesis(const ChainParams& params, const PublicKey& reward_key, std::uint64_t seed);

}  // namespace dietnet
