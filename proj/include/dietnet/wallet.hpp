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
#include <random>
#include <span>
#include <vector>

#include "dietnet/chain.hpp"
#include "dietnet/utxo_store.hpp"

namespace dietnet {

struct PaymentRequest {
    Digest32 to;  // recipient's ownership challenge
    std::uint64_t amount{0};
    std::uint64_t fee{0};
    //! The amount is split over this many outputs (remainder on the first).
    std::uint32_t pieces{1};
};

/**
 * Spends the sender's coins in ascending outpoint order until amount + fee is covered, pays the
 * recipient, returns change to the sender and signs every input over the shared sighash.
 * Throws ParamError when the sender cannot cover the payment.
 */
[[nodiscard]] Transaction build_payment(std::span<const Coin> available, const KeyPair& from,
                                        const PaymentRequest& request);

//! Signs every input of tx with the given key (all inputs share one sighash).
void sign_all_inputs(Transaction& tx, const KeyPair& key);

/**
 * Up to `count` non-conflicting payments between the wallets, each from a random sender to a
 * random recipient, split over up to max_pieces outputs and worth at most max_amount. Senders
 * without funds are skipped.
 * Only raw draws of the engine are used, so the result is the same on every platform.
 */
[[nodiscard]] std::vector<Transaction> random_payments(std::span<const Coin> coins, std::mt19937_64& rng,
                                                       std::span<const KeyPair> wallets, int count,
                                                       std::uint32_t max_pieces = 3,
                                                       std::uint64_t max_amount = UINT64_MAX);

}  // namespace dietnet
