#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace tipsim {

/// Index of a block in issuance order. Genesis is 0.
using BlockId = std::uint32_t;

inline constexpr BlockId kGenesisId = 0;

enum class Issuer : std::uint8_t { Genesis, Honest, Adversary };

enum class RemovalCause : std::uint8_t { Referenced, Expired };

std::string_view to_string(Issuer issuer);
std::string_view to_string(RemovalCause cause);

/// One mark of the arrival process plus its tip-pool lifecycle.
struct Block {
    BlockId id = 0;
    double issued_at = 0.0;
    double visible_at = 0.0;
    // Distinct parent ids in first-drawn order; empty for genesis.
    std::vector<BlockId> parents;
    Issuer issuer = Issuer::Honest;

    // Issuance time of the first honest block referencing this one.
    std::optional<double> approved_at;
    std::optional<double> removed_at;
    std::optional<RemovalCause> removal_cause;

    bool is_removed() const { return removed_at.has_value(); }
};

}  // namespace tipsim
