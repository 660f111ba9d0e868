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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace dietnet {

//! Caller passed an argument outside the operation's domain.
class ParamError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

//! Byte string does not decode under the expected schema.
class DecodeError : public std::runtime_error {
  public:
    DecodeError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_{offset} {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

  private:
    std::size_t offset_;
};

//! A partial Merkle tree lacks a sibling needed to reach the root.
class IncompleteProofError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Requested UTXO history is not held by the store.
class HistoryUnavailableError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! UTXO store asked to do something only an upstream validation bug could cause.
class InconsistentStateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Scenario or simulation setup is invalid. `path` names the offending field, e.g. script[3].amount.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what), path_{std::move(path)} {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }

  private:
    std::string path_;
};

//! Why a header, block, transaction or diet verification was refused.
enum class RejectReason {
    kNone,
    kPowFailure,
    kUnknownParent,
    kBadHeight,
    kBadGenesis,
    kDuplicate,
    kMalformed,
    kTxRootMismatch,
    kBadCoinbase,
    kMissingInput,
    kOwnershipFailure,
    kValueCreation,
    kValueOverflow,
    kUtxoRootMismatch,
    kShardProofMismatch,
    kProofMismatch,
    kRootMismatch,
    kMissingShard,
    kBlockMismatch,
    kCoinbaseProofMismatch,
    kUnknownHeader,
    kUnknownBlock,
    kHistoryUnavailable,
    kQueryFailed,
};

[[nodiscard]] std::string_view to_string(RejectReason reason);
[[nodiscard]] RejectReason reject_reason_from_string(std::string_view name);

}  // namespace dietnet
