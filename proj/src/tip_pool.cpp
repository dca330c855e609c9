#include "tipsim/tip_pool.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace tipsim {

TipPool::TipPool(std::optional<double> expiration_window) : expiration_window_(expiration_window) {
    if (expiration_window_ && !(*expiration_window_ > 0.0)) {
        throw std::invalid_argument("expiration window must be positive");
    }
}

std::vector<BlockId> TipPool::hidden_blocks() const {
    auto sorted = hidden_;
    std::sort(sorted.begin(), sorted.end(), [](const TimedEntry& a, const TimedEntry& b) {
        return Later{}(b, a);
    });
    std::vector<BlockId> out;
    out.reserve(sorted.size());
    for (const auto& e : sorted) out.push_back(e.id);
    return out;
}

void TipPool::push_removal(double time, BlockId id, RemovalCause cause) {
    removals_.push_back({time, seq_++, id, cause});
    std::push_heap(removals_.begin(), removals_.end(), Later{});
}

void TipPool::insert(DagStore& store, Block block) {
    if (block.issued_at < now_) {
        throw StructuralError("block " + std::to_string(block.id) + " issued before pool time");
    }
    if (block.visible_at < block.issued_at) {
        throw StructuralError("block " + std::to_string(block.id) + " visible before issuance");
    }
    // Deduplicate parents, keeping first-drawn order.
    std::vector<BlockId> distinct;
    distinct.reserve(block.parents.size());
    for (BlockId p : block.parents) {
        if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
    }
    block.parents = std::move(distinct);
    block.approved_at.reset();
    block.removed_at.reset();
    block.removal_cause.reset();

    const BlockId id = block.id;
    const double issued_at = block.issued_at;
    const double visible_at = block.visible_at;
    const bool approves = block.issuer == Issuer::Honest;

    store.append(std::move(block));
    if (visible_pos_.size() < store.size()) visible_pos_.resize(store.size(), -1);

    ++tip_count_;
    ++hidden_count_;
    hidden_.push_back({visible_at, seq_++, id, RemovalCause::Referenced});
    std::push_heap(hidden_.begin(), hidden_.end(), Later{});

    if (!approves) return;
    for (BlockId p : store.at(id).parents) {
        Block& parent = store.at(p);
        if (parent.approved_at || parent.is_removed()) continue;
        parent.approved_at = issued_at;
        --tip_count_;
        if (is_visible(p)) ++false_count_;
        push_removal(visible_at, p, RemovalCause::Referenced);
    }
}

void TipPool::erase_visible(BlockId id) {
    const auto pos = static_cast<std::size_t>(visible_pos_[id]);
    const BlockId last = visible_.back();
    visible_[pos] = last;
    visible_pos_[last] = static_cast<std::int32_t>(pos);
    visible_.pop_back();
    visible_pos_[id] = -1;
}

void TipPool::promote(DagStore& store, const TimedEntry& e) {
    Block& b = store.at(e.id);
    --hidden_count_;
    visible_pos_[e.id] = static_cast<std::int32_t>(visible_.size());
    visible_.push_back(e.id);
    if (b.approved_at) ++false_count_;
    if (expiration_window_) push_removal(e.time + *expiration_window_, e.id, RemovalCause::Expired);
}

void TipPool::apply_removal(DagStore& store, const TimedEntry& e, std::vector<Removal>& out) {
    Block& b = store.at(e.id);
    if (b.is_removed()) return;
    const bool visible = is_visible(e.id);
    if (e.cause == RemovalCause::Expired) {
        // Genesis stays while it is the only selectable block.
        if (e.id == kGenesisId && visible_.size() == 1) return;
        if (!visible) return;
    }
    if (visible) {
        erase_visible(e.id);
        if (b.approved_at) {
            --false_count_;
        } else {
            --tip_count_;
        }
    } else {
        // Only reachable when a block is referenced before its own promotion.
        auto it = std::find_if(hidden_.begin(), hidden_.end(),
                               [&](const TimedEntry& h) { return h.id == e.id; });
        if (it == hidden_.end()) return;
        hidden_.erase(it);
        std::make_heap(hidden_.begin(), hidden_.end(), Later{});
        --hidden_count_;
    }
    b.removed_at = e.time;
    b.removal_cause = e.cause;
    if (e.cause == RemovalCause::Referenced) {
        ++referenced_removals_;
    } else {
        ++expired_removals_;
    }
    out.push_back({e.id, e.time, e.cause});
}

void TipPool::advance(DagStore& store, double to, std::vector<Removal>& out) {
    if (to < now_) {
        throw std::invalid_argument("cannot advance tip pool backwards in time");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (;;) {
        const double next_removal = removals_.empty() ? inf : removals_.front().time;
        const double next_promotion = hidden_.empty() ? inf : hidden_.front().time;
        if (next_removal > to && next_promotion > to) break;
        if (next_removal <= next_promotion) {
            std::pop_heap(removals_.begin(), removals_.end(), Later{});
            TimedEntry e = removals_.back();
            removals_.pop_back();
            now_ = e.time;
            apply_removal(store, e, out);
        } else {
            std::pop_heap(hidden_.begin(), hidden_.end(), Later{});
            TimedEntry e = hidden_.back();
            hidden_.pop_back();
            now_ = e.time;
            promote(store, e);
        }
    }
    now_ = to;
}

void insert_block(DagStore& store, TipPool& pool, Block block) {
    pool.insert(store, std::move(block));
}

std::vector<Removal> advance_time(DagStore& store, TipPool& pool, double to) {
    std::vector<Removal> out;
    pool.advance(store, to, out);
    return out;
}

}  // namespace tipsim
