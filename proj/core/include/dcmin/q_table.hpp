#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dcmin/controllers.hpp"
#include "dcmin/grid_mdp.hpp"

namespace dcmin {

/// Which state features an agent keys its Q-table on:
///   S1 = (tau, soc), S2 = (tau, soc, sign of PV surplus),
///   S3 = (tau, soc, delta), S4 = (tau, soc, delta, peak).
enum class StateVariant { S1, S2, S3, S4 };

inline bool uses_peak(StateVariant v) { return v == StateVariant::S4; }

/// Projection of the consumption/production balance onto the variant's key.
/// S2 yields +1 when PV exceeds consumption, -1 when it falls short, else 0.
int delta_key(StateVariant variant, double delta_kw, const Axis& delta_axis);

/// The sparse part of a Q-table key. Everything else (soc, peak, action) is
/// dense inside a block, since per-day DP sweeps all of it.
struct BlockKey {
    int tau = 0;
    int delta_key = 0;

    auto operator<=>(const BlockKey&) const = default;
};

/// Visit-counted tabular Q-function. Only keys realized by some day's
/// delta sequence exist; within a block, cells with zero visits are absent.
class SparseQ {
public:
    struct Block {
        std::vector<double> value;
        std::vector<std::uint32_t> visits;

        bool operator==(const Block&) const = default;
    };

    SparseQ() = default;
    SparseQ(StateVariant variant, int n_soc, int n_peak, int n_action);

    StateVariant variant() const { return variant_; }
    int n_soc() const { return n_soc_; }
    int n_peak() const { return n_peak_; }
    int n_action() const { return n_action_; }

    std::size_t cell(int soc, int peak, int action) const {
        return static_cast<std::size_t>((soc * n_peak_ + peak) * n_action_ + action);
    }

    /// Running mean with weight 1 / visits.
    void fold(const BlockKey& key, int soc, int peak, int action, double q);

    /// Direct write, for deserialization. visits must be >= 1.
    void set(const BlockKey& key, int soc, int peak, int action, double value,
             std::uint32_t visits);

    const Block* find(const BlockKey& key) const;
    Block& block(const BlockKey& key);

    std::optional<double> value(const BlockKey& key, int soc, int peak, int action) const;
    std::uint32_t visits(const BlockKey& key, int soc, int peak, int action) const;

    std::size_t entry_count() const;
    const std::map<BlockKey, Block>& blocks() const { return blocks_; }

    bool operator==(const SparseQ&) const = default;

private:
    StateVariant variant_ = StateVariant::S4;
    int n_soc_ = 0;
    int n_peak_ = 0;
    int n_action_ = 0;
    std::map<BlockKey, Block> blocks_;
};

/// Argmin over the stored actions of a (soc, peak) cell, scanning
/// `tie_order` so equal values resolve to the smaller |a|, then smaller a.
std::optional<int> greedy_action(const SparseQ& q, const SparseQ::Block& block, int soc, int peak,
                                 std::span<const int> tie_order);

/// Deterministic tabular policy with a controller for unseen states.
class Policy {
public:
    static constexpr std::int16_t kAbsent = -1;

    Policy() = default;
    Policy(StateVariant variant, int n_soc, int n_peak, ControllerKind fallback);

    StateVariant variant() const { return variant_; }
    int n_soc() const { return n_soc_; }
    int n_peak() const { return n_peak_; }
    ControllerKind fallback() const { return fallback_; }
    void set_fallback(ControllerKind kind) { fallback_ = kind; }

    std::optional<int> lookup(const BlockKey& key, int soc, int peak) const;
    void set(const BlockKey& key, int soc, int peak, int action);

    const std::map<BlockKey, std::vector<std::int16_t>>& table() const { return table_; }
    std::size_t entry_count() const;
    /// Number of table cells whose action differs (absent counts as a value).
    std::size_t count_differences(const Policy& other) const;

    bool operator==(const Policy&) const = default;

private:
    StateVariant variant_ = StateVariant::S4;
    int n_soc_ = 0;
    int n_peak_ = 0;
    ControllerKind fallback_ = ControllerKind::Lazy;
    std::map<BlockKey, std::vector<std::int16_t>> table_;
};

}  // namespace dcmin
