#include "tipsim/dag_store.hpp"

#include <ostream>

#include "tipsim/format.hpp"

namespace tipsim {

std::string_view to_string(Issuer issuer) {
    switch (issuer) {
        case Issuer::Genesis: return "Genesis";
        case Issuer::Honest: return "Honest";
        case Issuer::Adversary: return "Adversary";
    }
    return "?";
}

std::string_view to_string(RemovalCause cause) {
    switch (cause) {
        case RemovalCause::Referenced: return "Referenced";
        case RemovalCause::Expired: return "Expired";
    }
    return "?";
}

void DagStore::append(Block block) {
    if (block.id != next_id()) {
        throw StructuralError("block id " + std::to_string(block.id) + " is not the next id " +
                              std::to_string(next_id()));
    }
    for (BlockId p : block.parents) {
        if (p >= block.id) {
            throw StructuralError("block " + std::to_string(block.id) + " references unknown parent " +
                                  std::to_string(p));
        }
    }
    for (BlockId p : block.parents) children_[p].push_back(block.id);
    blocks_.push_back(std::move(block));
    children_.emplace_back();
}

const Block& DagStore::at(BlockId id) const {
    if (!contains(id)) throw StructuralError("unknown block id " + std::to_string(id));
    return blocks_[id];
}

Block& DagStore::at(BlockId id) {
    if (!contains(id)) throw StructuralError("unknown block id " + std::to_string(id));
    return blocks_[id];
}

std::span<const BlockId> DagStore::children(BlockId id) const {
    if (!contains(id)) throw StructuralError("unknown block id " + std::to_string(id));
    return children_[id];
}

void DagStore::reserve(std::size_t n) {
    blocks_.reserve(n);
    children_.reserve(n);
}

std::vector<bool> ancestor_mask(const DagStore& store, std::span<const BlockId> roots) {
    std::vector<bool> seen(store.size(), false);
    std::vector<BlockId> stack;
    for (BlockId r : roots) {
        if (!store.contains(r)) throw StructuralError("unknown root id " + std::to_string(r));
        if (!seen[r]) {
            seen[r] = true;
            stack.push_back(r);
        }
    }
    while (!stack.empty()) {
        BlockId b = stack.back();
        stack.pop_back();
        for (BlockId p : store.blocks()[b].parents) {
            if (!seen[p]) {
                seen[p] = true;
                stack.push_back(p);
            }
        }
    }
    return seen;
}

std::vector<BlockId> ancestors_of(const DagStore& store, std::span<const BlockId> roots) {
    auto mask = ancestor_mask(store, roots);
    std::vector<BlockId> out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) out.push_back(static_cast<BlockId>(i));
    }
    return out;
}

bool parents_within_age(const DagStore& store, const Block& block, double max_age) {
    for (BlockId p : block.parents) {
        if (p == kGenesisId) continue;
        if (block.issued_at - store.at(p).issued_at > max_age) return false;
    }
    return true;
}

void write_dag_csv(std::ostream& out, const DagStore& store) {
    out << "id,issued_at,visible_at,parent_ids,issuer,removed_at,cause\n";
    for (const Block& b : store.blocks()) {
        out << b.id << ',' << format_number(b.issued_at) << ',' << format_number(b.visible_at) << ',';
        for (std::size_t i = 0; i < b.parents.size(); ++i) {
            if (i) out << ';';
            out << b.parents[i];
        }
        out << ',' << to_string(b.issuer) << ',' << format_optional(b.removed_at) << ',';
        if (b.removal_cause) out << to_string(*b.removal_cause);
        out << '\n';
    }
}

}  // namespace tipsim
