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

#include "dietnet/merkle.hpp"

#include <algorithm>

#include "dietnet/codec.hpp"
#include "dietnet/crypto.hpp"
#include "dietnet/errors.hpp"

namespace dietnet {

Digest32 hash_pair(const Digest32& left, const Digest32& right) {
    std::array<std::uint8_t, 64> buf{};
    std::copy(left.bytes.begin(), left.bytes.end(), buf.begin());
    std::copy(right.bytes.begin(), right.bytes.end(), buf.begin() + 32);
    return hash256(ByteSpan{buf});
}

MerkleTree::MerkleTree(std::vector<Digest32> leaves) {
    if (leaves.empty()) throw ParamError("Merkle tree needs at least one leaf");
    levels_.push_back(std::move(leaves));
    while (levels_.back().size() > 1) {
        const auto& below = levels_.back();
        std::vector<Digest32> above;
        above.reserve((below.size() + 1) / 2);
        for (std::size_t i = 0; i < below.size(); i += 2) {
            const auto& right = i + 1 < below.size() ? below[i + 1] : below[i];
            above.push_back(hash_pair(below[i], right));
        }
        levels_.push_back(std::move(above));
    }
}

Digest32 build_root(std::span<const Digest32> leaves) {
    return MerkleTree(std::vector<Digest32>(leaves.begin(), leaves.end())).root();
}

std::uint32_t level_width(std::uint32_t total_leaves, unsigned level) {
    std::uint64_t width = total_leaves;
    for (unsigned l = 0; l < level; ++l) width = (width + 1) / 2;
    return static_cast<std::uint32_t>(width);
}

unsigned tree_depth(std::uint32_t total_leaves) {
    unsigned depth = 0;
    for (std::uint64_t width = total_leaves; width > 1; width = (width + 1) / 2) ++depth;
    return depth;
}

PartialMerkleTree extract_partial(std::span<const Digest32> leaves, const std::set<std::uint32_t>& include) {
    if (include.empty()) throw ParamError("partial tree needs at least one included leaf");
    if (*include.rbegin() >= leaves.size()) throw ParamError("included leaf index out of range");

    MerkleTree full(std::vector<Digest32>(leaves.begin(), leaves.end()));
    PartialMerkleTree out;
    out.total_leaves = static_cast<std::uint32_t>(leaves.size());
    for (auto i : include) out.included.emplace(i, leaves[i]);

    std::set<std::uint32_t> known = include;
    const auto& levels = full.levels();
    for (std::size_t level = 0; level + 1 < levels.size(); ++level) {
        const auto width = levels[level].size();
        std::set<std::uint32_t> above;
        for (auto i : known) {
            auto sibling = i ^ 1u;
            if (sibling < width && !known.contains(sibling)) {
                out.siblings.emplace(std::pair{static_cast<std::uint8_t>(level), sibling}, levels[level][sibling]);
            }
            above.insert(i / 2);
        }
        known = std::move(above);
    }
    return out;
}

Digest32 partial_root(const PartialMerkleTree& tree) {
    if (tree.total_leaves == 0) throw IncompleteProofError("partial tree has no leaves");
    if (tree.included.empty()) throw IncompleteProofError("partial tree includes no leaf");

    std::map<std::uint32_t, Digest32> current = tree.included;
    const auto depth = tree_depth(tree.total_leaves);
    for (unsigned level = 0; level < depth; ++level) {
        const auto width = level_width(tree.total_leaves, level);
        std::map<std::uint32_t, Digest32> above;
        for (const auto& [i, hash] : current) {
            if (i >= width) throw IncompleteProofError("node index outside its level");
            if (above.contains(i / 2)) continue;
            auto sibling_index = i ^ 1u;
            Digest32 sibling;
            if (sibling_index >= width) {
                sibling = hash;
            } else if (auto it = current.find(sibling_index); it != current.end()) {
                sibling = it->second;
            } else if (auto st = tree.siblings.find({static_cast<std::uint8_t>(level), sibling_index});
                       st != tree.siblings.end()) {
                sibling = st->second;
            } else {
                throw IncompleteProofError("missing sibling at level " + std::to_string(level) + " index " +
                                           std::to_string(sibling_index));
            }
            above.emplace(i / 2, (i % 2 == 0) ? hash_pair(hash, sibling) : hash_pair(sibling, hash));
        }
        current = std::move(above);
    }
    return current.begin()->second;
}

bool contains(const PartialMerkleTree& tree, const Digest32& leaf_hash) {
    return std::any_of(tree.included.begin(), tree.included.end(),
                       [&](const auto& entry) { return entry.second == leaf_hash; });
}

PartialMerkleTree update_in_place(const PartialMerkleTree& tree, const std::map<std::uint32_t, Digest32>& changed) {
    PartialMerkleTree out = tree;
    for (const auto& [i, hash] : changed) {
        auto it = out.included.find(i);
        if (it == out.included.end()) {
            throw ParamError("cannot update leaf " + std::to_string(i) + ": not witnessed by the partial tree");
        }
        it->second = hash;
    }
    return out;
}

void write(Writer& w, const PartialMerkleTree& tree) {
    w.u32(tree.total_leaves);
    w.count16(tree.included.size(), "included leaves");
    for (const auto& [i, hash] : tree.included) {
        w.u32(i);
        w.digest(hash);
    }
    w.count16(tree.siblings.size(), "sibling hashes");
    for (const auto& [pos, hash] : tree.siblings) {
        w.u8(pos.first);
        w.u32(pos.second);
        w.digest(hash);
    }
}

PartialMerkleTree read_partial_tree(Reader& r) {
    PartialMerkleTree tree;
    tree.total_leaves = r.u32();
    if (tree.total_leaves == 0) r.fail("partial tree with zero leaves");
    const auto depth = tree_depth(tree.total_leaves);
    auto n_included = r.u16();
    for (std::uint16_t n = 0; n < n_included; ++n) {
        auto i = r.u32();
        if (i >= tree.total_leaves) r.fail("included leaf index out of range");
        if (!tree.included.emplace(i, r.digest()).second) r.fail("duplicate included leaf");
    }
    auto n_siblings = r.u16();
    for (std::uint16_t n = 0; n < n_siblings; ++n) {
        auto level = r.u8();
        auto i = r.u32();
        if (level >= depth || i >= level_width(tree.total_leaves, level)) r.fail("sibling position out of range");
        if (!tree.siblings.emplace(std::pair{level, i}, r.digest()).second) r.fail("duplicate sibling");
    }
    return tree;
}

Bytes encode(const PartialMerkleTree& tree) {
    Writer w;
    write(w, tree);
    return std::move(w).take();
}

PartialMerkleTree decode_partial_tree(ByteSpan data) {
    Reader r(data);
    auto tree = read_partial_tree(r);
    r.expect_end();
    return tree;
}

}  // namespace dietnet
