#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "tipsim/block.hpp"
#include "tipsim/dag_store.hpp"
#include "tipsim/rng.hpp"

namespace tipsim {

struct SelectionParams {
    int k = 2;
    double mu = 1.0;  // honest fraction of the issuance rate
};

/// Throws std::invalid_argument unless k >= 1 and 0 <= mu <= 1.
void validate(const SelectionParams& params);

/// Raised when honest selection is attempted on an empty visible pool.
class EmptyTipPool : public std::runtime_error {
public:
    EmptyTipPool() : std::runtime_error("visible tip pool is empty") {}
};

/// k independent uniform draws with replacement from the visible pool.
std::vector<BlockId> select_honest(std::span<const BlockId> visible, int k, Rng& rng);

/// Fallback for an empty visible pool: the k most recently issued blocks.
std::vector<BlockId> select_recent(const DagStore& store, int k);

struct AdversaryState {
    std::optional<BlockId> last_own_block;
};

/// Own-chain strategy: k copies of the adversary's previous block, or of
/// genesis for the first block. When `max_parent_age` is set and the previous
/// block is older than that at `issued_at`, genesis is used instead.
/// The caller records the newly issued id in state.last_own_block.
std::vector<BlockId> select_adversary(const AdversaryState& state, const DagStore& store, int k,
                                      double issued_at,
                                      std::optional<double> max_parent_age = std::nullopt);

}  // namespace tipsim
