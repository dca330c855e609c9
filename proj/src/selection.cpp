#include "tipsim/selection.hpp"

#include <string>

namespace tipsim {

void validate(const SelectionParams& params) {
    if (params.k < 1) throw std::invalid_argument("k must be >= 1");
    if (!(params.mu >= 0.0 && params.mu <= 1.0)) {
        throw std::invalid_argument("mu must be in [0, 1]");
    }
}

std::vector<BlockId> select_honest(std::span<const BlockId> visible, int k, Rng& rng) {
    if (visible.empty()) throw EmptyTipPool{};
    std::vector<BlockId> out(static_cast<std::size_t>(k));
    for (auto& id : out) id = visible[rng.below(visible.size())];
    return out;
}

std::vector<BlockId> select_recent(const DagStore& store, int k) {
    std::vector<BlockId> out;
    const auto n = static_cast<BlockId>(store.size());
    for (BlockId i = 0; i < static_cast<BlockId>(k) && i < n; ++i) out.push_back(n - 1 - i);
    return out;
}

std::vector<BlockId> select_adversary(const AdversaryState& state, const DagStore& store, int k,
                                      double issued_at, std::optional<double> max_parent_age) {
    BlockId anchor = kGenesisId;
    if (state.last_own_block) {
        const Block& last = store.at(*state.last_own_block);
        if (last.issuer != Issuer::Adversary) {
            throw StructuralError("adversary anchor " + std::to_string(last.id) +
                                  " is not an adversary block");
        }
        if (!max_parent_age || issued_at - last.issued_at <= *max_parent_age) anchor = last.id;
    }
    return std::vector<BlockId>(static_cast<std::size_t>(k), anchor);
}

}  // namespace tipsim
