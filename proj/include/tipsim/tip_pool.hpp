#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tipsim/block.hpp"
#include "tipsim/dag_store.hpp"

namespace tipsim {

struct Removal {
    BlockId id = 0;
    double time = 0.0;
    RemovalCause cause = RemovalCause::Referenced;
};

/// Global tip pool with delayed visibility and optional expiration.
///
/// A block enters the hidden queue when inserted and becomes selectable at its
/// visible_at. It leaves the visible set when the first approving block becomes
/// visible (Referenced) or at visible_at + expiration_window (Expired),
/// whichever comes first; a tie counts as Referenced. Removals scheduled for
/// the same instant as a promotion are applied first.
///
/// Three counts are tracked:
///  - occupancy(): |visible| + |hidden|
///  - false_count(): visible blocks already approved by a still-hidden block
///  - tip_count(): blocks not yet approved by any issued block and not
///    expired, i.e. the model's L(t) = hidden + real tips
///
/// Only honest blocks approve. Adversary blocks keep their references in the
/// DAG but never remove anything from the pool.
class TipPool {
public:
    explicit TipPool(std::optional<double> expiration_window = std::nullopt);

    double now() const { return now_; }
    std::optional<double> expiration_window() const { return expiration_window_; }

    std::span<const BlockId> visible() const { return visible_; }
    bool is_visible(BlockId id) const {
        return id < visible_pos_.size() && visible_pos_[id] >= 0;
    }
    /// Hidden blocks not yet promoted, in activation order.
    std::vector<BlockId> hidden_blocks() const;

    std::size_t visible_count() const { return visible_.size(); }
    std::size_t hidden_count() const { return hidden_count_; }
    std::size_t occupancy() const { return visible_.size() + hidden_count_; }
    std::size_t false_count() const { return false_count_; }
    std::size_t tip_count() const { return tip_count_; }

    std::uint64_t referenced_removals() const { return referenced_removals_; }
    std::uint64_t expired_removals() const { return expired_removals_; }

    /// See insert_block.
    void insert(DagStore& store, Block block);

    /// See advance_time. Removals are appended to `out` in time order.
    void advance(DagStore& store, double to, std::vector<Removal>& out);

private:
    struct TimedEntry {
        double time;
        std::uint64_t seq;
        BlockId id;
        RemovalCause cause;
    };
    struct Later {
        bool operator()(const TimedEntry& a, const TimedEntry& b) const {
            if (a.time != b.time) return a.time > b.time;
            if (a.cause != b.cause) return a.cause == RemovalCause::Expired;
            return a.seq > b.seq;
        }
    };

    void push_removal(double time, BlockId id, RemovalCause cause);
    void promote(DagStore& store, const TimedEntry& e);
    void apply_removal(DagStore& store, const TimedEntry& e, std::vector<Removal>& out);
    void erase_visible(BlockId id);

    std::optional<double> expiration_window_;
    double now_ = 0.0;
    std::uint64_t seq_ = 0;

    std::vector<BlockId> visible_;
    std::vector<std::int32_t> visible_pos_;
    std::vector<TimedEntry> hidden_;    // min-heap on (time, seq)
    std::vector<TimedEntry> removals_;  // min-heap on (time, seq)

    std::size_t hidden_count_ = 0;
    std::size_t false_count_ = 0;
    std::size_t tip_count_ = 0;
    std::uint64_t referenced_removals_ = 0;
    std::uint64_t expired_removals_ = 0;
};

/// Appends `block` to the store and enqueues it as hidden until visible_at.
/// For an honest block, every distinct parent that has no approver yet is
/// marked approved at block.issued_at and scheduled for removal at
/// block.visible_at. Throws StructuralError on unknown parents or ids out of
/// order, and when the block is issued before the pool's current time.
void insert_block(DagStore& store, TipPool& pool, Block block);

/// Advances the pool clock to `to`, applying promotions, referenced removals
/// and expirations in time order. Throws std::invalid_argument if `to` is
/// earlier than the current pool time.
std::vector<Removal> advance_time(DagStore& store, TipPool& pool, double to);

}  // namespace tipsim
