#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tipsim/block.hpp"

namespace tipsim {

/// Thrown on malformed insertions (unknown parent, out-of-order id). These are
/// programming errors in the caller and abort the run.
class StructuralError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Append-only block store with the inverse (children) relation.
class DagStore {
public:
    DagStore() = default;

    /// Appends a block; its id must equal size() and all parents must exist.
    void append(Block block);

    std::size_t size() const { return blocks_.size(); }
    bool empty() const { return blocks_.empty(); }
    bool contains(BlockId id) const { return id < blocks_.size(); }

    const Block& at(BlockId id) const;
    Block& at(BlockId id);

    std::span<const Block> blocks() const { return blocks_; }
    std::span<const BlockId> children(BlockId id) const;

    BlockId next_id() const { return static_cast<BlockId>(blocks_.size()); }

    void reserve(std::size_t n);

private:
    std::vector<Block> blocks_;
    std::vector<std::vector<BlockId>> children_;
};

/// Union of the past cones of `roots` (roots included).
std::vector<BlockId> ancestors_of(const DagStore& store, std::span<const BlockId> roots);

/// Same as ancestors_of but as a membership mask indexed by BlockId.
std::vector<bool> ancestor_mask(const DagStore& store, std::span<const BlockId> roots);

/// True when every non-genesis parent of `block` is at most `max_age` older.
bool parents_within_age(const DagStore& store, const Block& block, double max_age);

/// CSV dump: id,issued_at,visible_at,parent_ids,issuer,removed_at,cause
void write_dag_csv(std::ostream& out, const DagStore& store);

}  // namespace tipsim
