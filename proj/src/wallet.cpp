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

#include "dietnet/wallet.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "dietnet/errors.hpp"

namespace dietnet {

void sign_all_inputs(Transaction& tx, const KeyPair& key) {
    for (auto& in : tx.inputs) in.public_key = key.public_key;
    const auto digest = sighash(tx);
    const auto sig = sign(key.private_key, digest);
    for (auto& in : tx.inputs) in.signature = sig;
}

Transaction build_payment(std::span<const Coin> available, const KeyPair& from, const PaymentRequest& request) {
    if (request.pieces == 0) throw ParamError("payment needs at least one output");
    if (request.amount < request.pieces) throw ParamError("payment amount smaller than its output count");
    const auto owner = challenge_of(from.public_key);
    std::vector<Coin> mine;
    std::copy_if(available.begin(), available.end(), std::back_inserter(mine),
                 [&](const Coin& c) { return c.challenge == owner; });
    std::sort(mine.begin(), mine.end());

    const auto needed = request.amount + request.fee;
    Transaction tx;
    std::uint64_t gathered = 0;
    for (const auto& coin : mine) {
        if (gathered >= needed) break;
        tx.inputs.push_back(TxInput{coin.outpoint, {}, {}});
        gathered += coin.value;
    }
    if (gathered < needed) {
        throw ParamError("insufficient funds: have " + std::to_string(gathered) + ", need " + std::to_string(needed));
    }

    const auto share = request.amount / request.pieces;
    for (std::uint32_t i = 0; i < request.pieces; ++i) {
        auto value = share + (i == 0 ? request.amount % request.pieces : 0);
        tx.outputs.push_back(TxOutput{value, OutputKind::kPayToPubkeyHash, request.to});
    }
    if (gathered > needed) tx.outputs.push_back(TxOutput{gathered - needed, OutputKind::kPayToPubkeyHash, owner});

    sign_all_inputs(tx, from);
    return tx;
}

std::vector<Transaction> random_payments(std::span<const Coin> coins, std::mt19937_64& rng,
                                         std::span<const KeyPair> wallets, int count, std::uint32_t max_pieces,
                                         std::uint64_t max_amount) {
    if (wallets.empty() || max_pieces == 0 || max_amount == 0) {
        throw ParamError("random payments need wallets, max_pieces >= 1 and max_amount >= 1");
    }
    std::set<OutPoint> used;
    std::vector<Transaction> txs;
    for (int i = 0; i < count; ++i) {
        const auto& from = wallets[rng() % wallets.size()];
        const auto& to = wallets[rng() % wallets.size()];
        const auto owner = challenge_of(from.public_key);
        std::vector<Coin> available;
        std::uint64_t funds = 0;
        for (const auto& c : coins) {
            if (c.challenge != owner || used.contains(c.outpoint)) continue;
            available.push_back(c);
            funds += c.value;
        }
        if (funds < 2) continue;
        const std::uint64_t fee = rng() % 2;
        const std::uint64_t amount = 1 + rng() % std::min(funds - fee, max_amount);
        const auto pieces = static_cast<std::uint32_t>(std::min<std::uint64_t>(1 + rng() % max_pieces, amount));
        auto tx = build_payment(available, from, PaymentRequest{challenge_of(to.public_key), amount, fee, pieces});
        for (const auto& in : tx.inputs) used.insert(in.prevout);
        txs.push_back(std::move(tx));
    }
    return txs;
}

}  // namespace dietnet
