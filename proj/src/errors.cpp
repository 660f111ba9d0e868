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

#include "dietnet/errors.hpp"

#include <array>
#include <utility>

namespace dietnet {

namespace {

constexpr std::array<std::pair<RejectReason, std::string_view>, 24> kNames{{
    {RejectReason::kNone, "none"},
    {RejectReason::kPowFailure, "pow-failure"},
    {RejectReason::kUnknownParent, "unknown-parent"},
    {RejectReason::kBadHeight, "bad-height"},
    {RejectReason::kBadGenesis, "bad-genesis"},
    {RejectReason::kDuplicate, "duplicate"},
    {RejectReason::kMalformed, "malformed"},
    {RejectReason::kTxRootMismatch, "tx-root-mismatch"},
    {RejectReason::kBadCoinbase, "bad-coinbase"},
    {RejectReason::kMissingInput, "missing-input"},
    {RejectReason::kOwnershipFailure, "ownership-failure"},
    {RejectReason::kValueCreation, "value-creation"},
    {RejectReason::kValueOverflow, "value-overflow"},
    {RejectReason::kUtxoRootMismatch, "utxo-root-mismatch"},
    {RejectReason::kShardProofMismatch, "shard-proof-mismatch"},
    {RejectReason::kProofMismatch, "proof-mismatch"},
    {RejectReason::kRootMismatch, "root-mismatch"},
    {RejectReason::kMissingShard, "missing-shard"},
    {RejectReason::kBlockMismatch, "block-mismatch"},
    {RejectReason::kCoinbaseProofMismatch, "coinbase-proof-mismatch"},
    {RejectReason::kUnknownHeader, "unknown-header"},
    {RejectReason::kUnknownBlock, "unknown-block"},
    {RejectReason::kHistoryUnavailable, "history-unavailable"},
    {RejectReason::kQueryFailed, "query-failed"},
}};

}  // namespace

std::string_view to_string(RejectReason reason) {
    for (const auto& [r, name] : kNames) {
        if (r == reason) return name;
    }
    return "unknown";
}

RejectReason reject_reason_from_string(std::string_view name) {
    for (const auto& [r, n] : kNames) {
        if (n == name) return r;
    }
    throw ParamError("unknown reject reason: " + std::string(name));
}

}  // namespace dietnet
