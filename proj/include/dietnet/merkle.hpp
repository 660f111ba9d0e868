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
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "dietnet/bytes.hpp"

namespace dietnet {

class Reader;
class Writer;

[[nodiscard]] Digest32 hash_pair(const Digest32& left, const Digest32& right);

/**
 * Binary Merkle tree, level 0 = leaves. An odd-width level pairs its last node with itself.
 * UTXO trees always have 2^k leaves so the duplication rule only fires for transaction trees.
 */
class MerkleTree {
  public:
    //! Throws ParamError on an empty leaf list.
    explicit MerkleTree(std::vector<Digest32> leaves);

    [[nodiscard]] const Digest32& root() const { return levels_.back().front(); }
    [[nodiscard]] const std::vector<std::vector<Digest32>>& levels() const { return levels_; }
    [[nodiscard]] std::size_t leaf_count() const { return levels_.front().size(); }

  private:
    std::vector<std::vector<Digest32>> levels_;
};

[[nodiscard]] Digest32 build_root(std::span<const Digest32> leaves);

//! Number of nodes on `level` of a tree with `total_leaves` leaves.
[[nodiscard]] std::uint32_t level_width(std::uint32_t total_leaves, unsigned level);
//! Levels above the leaves, i.e. ceil(log2(total_leaves)).
[[nodiscard]] unsigned tree_depth(std::uint32_t total_leaves);

/**
 * Pruned tree: the chosen leaves plus exactly the sibling hashes that cannot be derived from
 * them. Keys of `siblings` are (level, index).
 */
struct PartialMerkleTree {
    std::uint32_t total_leaves{0};
    std::map<std::uint32_t, Digest32> included;
    std::map<std::pair<std::uint8_t, std::uint32_t>, Digest32> siblings;

    friend bool operator==(const PartialMerkleTree&, const PartialMerkleTree&) = default;
};

//! Throws ParamError on an empty include set or an out-of-range index.
[[nodiscard]] PartialMerkleTree extract_partial(std::span<const Digest32> leaves,
                                                const std::set<std::uint32_t>& include);

//! Throws IncompleteProofError when a needed sibling is missing.
[[nodiscard]] Digest32 partial_root(const PartialMerkleTree& tree);

[[nodiscard]] bool contains(const PartialMerkleTree& tree, const Digest32& leaf_hash);

//! Substitutes leaf hashes; every changed index must already be included (else ParamError).
[[nodiscard]] PartialMerkleTree update_in_place(const PartialMerkleTree& tree,
                                                const std::map<std::uint32_t, Digest32>& changed);

// total_leaves u32 | n_included u16 | (index u32, hash)* | n_siblings u16 | (level u8, index u32, hash)*
void write(Writer& w, const PartialMerkleTree& tree);
[[nodiscard]] PartialMerkleTree read_partial_tree(Reader& r);
[[nodiscard]] Bytes encode(const PartialMerkleTree& tree);
[[nodiscard]] PartialMerkleTree decode_partial_tree(ByteSpan data);

}  // namespace dietnet
