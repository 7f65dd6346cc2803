#include "dcmin/q_table.hpp"

#include <string>

#include "dcmin/errors.hpp"

namespace dcmin {

int delta_key(StateVariant variant, double delta_kw, const Axis& delta_axis) {
    switch (variant) {
        case StateVariant::S1:
            return 0;
        case StateVariant::S2:
            return delta_kw < 0.0 ? 1 : (delta_kw > 0.0 ? -1 : 0);
        case StateVariant::S3:
        case StateVariant::S4:
            return delta_axis.snap(delta_kw);
    }
    return 0;
}

SparseQ::SparseQ(StateVariant variant, int n_soc, int n_peak, int n_action)
    : variant_(variant), n_soc_(n_soc), n_peak_(n_peak), n_action_(n_action) {}

SparseQ::Block& SparseQ::block(const BlockKey& key) {
    auto [it, inserted] = blocks_.try_emplace(key);
    if (inserted) {
        const auto n = static_cast<std::size_t>(n_soc_ * n_peak_ * n_action_);
        it->second.value.assign(n, 0.0);
        it->second.visits.assign(n, 0);
    }
    return it->second;
}

void SparseQ::fold(const BlockKey& key, int soc, int peak, int action, double q) {
    Block& b = block(key);
    const auto c = cell(soc, peak, action);
    const std::uint32_t n = ++b.visits[c];
    // Qbar_{n} = (1 - 1/n) Qbar_{n-1} + (1/n) q
    b.value[c] += (q - b.value[c]) / static_cast<double>(n);
}

void SparseQ::set(const BlockKey& key, int soc, int peak, int action, double value,
                  std::uint32_t visits) {
    if (visits == 0) throw DataError("stored Q entries need at least one visit");
    Block& b = block(key);
    const auto c = cell(soc, peak, action);
    b.value[c] = value;
    b.visits[c] = visits;
}

const SparseQ::Block* SparseQ::find(const BlockKey& key) const {
    auto it = blocks_.find(key);
    return it == blocks_.end() ? nullptr : &it->second;
}

std::optional<double> SparseQ::value(const BlockKey& key, int soc, int peak, int action) const {
    const Block* b = find(key);
    if (b == nullptr) return std::nullopt;
    const auto c = cell(soc, peak, action);
    if (b->visits[c] == 0) return std::nullopt;
    return b->value[c];
}

std::uint32_t SparseQ::visits(const BlockKey& key, int soc, int peak, int action) const {
    const Block* b = find(key);
    return b == nullptr ? 0 : b->visits[cell(soc, peak, action)];
}

std::size_t SparseQ::entry_count() const {
    std::size_t n = 0;
    for (const auto& [key, b] : blocks_) {
        for (auto v : b.visits) n += v > 0 ? 1 : 0;
    }
    return n;
}

std::optional<int> greedy_action(const SparseQ& q, const SparseQ::Block& block, int soc, int peak,
                                 std::span<const int> tie_order) {
    std::optional<int> best;
    double best_value = 0.0;
    for (int a : tie_order) {
        const auto c = q.cell(soc, peak, a);
        if (block.visits[c] == 0) continue;
        if (!best || block.value[c] < best_value) {
            best = a;
            best_value = block.value[c];
        }
    }
    return best;
}

Policy::Policy(StateVariant variant, int n_soc, int n_peak, ControllerKind fallback)
    : variant_(variant), n_soc_(n_soc), n_peak_(n_peak), fallback_(fallback) {}

std::optional<int> Policy::lookup(const BlockKey& key, int soc, int peak) const {
    auto it = table_.find(key);
    if (it == table_.end()) return std::nullopt;
    const std::int16_t a = it->second[static_cast<std::size_t>(soc * n_peak_ + peak)];
    if (a == kAbsent) return std::nullopt;
    return a;
}

void Policy::set(const BlockKey& key, int soc, int peak, int action) {
    auto [it, inserted] = table_.try_emplace(key);
    if (inserted) it->second.assign(static_cast<std::size_t>(n_soc_ * n_peak_), kAbsent);
    it->second[static_cast<std::size_t>(soc * n_peak_ + peak)] = static_cast<std::int16_t>(action);
}

std::size_t Policy::entry_count() const {
    std::size_t n = 0;
    for (const auto& [key, cells] : table_) {
        for (auto a : cells) n += a != kAbsent ? 1 : 0;
    }
    return n;
}

std::size_t Policy::count_differences(const Policy& other) const {
    const auto cells = static_cast<std::size_t>(n_soc_ * n_peak_);
    const std::vector<std::int16_t> absent(cells, kAbsent);
    std::size_t diff = 0;
    auto count = [&](const std::vector<std::int16_t>& l, const std::vector<std::int16_t>& r) {
        for (std::size_t i = 0; i < cells; ++i) diff += l[i] != r[i] ? 1 : 0;
    };
    for (const auto& [key, cells_l] : table_) {
        auto it = other.table_.find(key);
        count(cells_l, it == other.table_.end() ? absent : it->second);
    }
    for (const auto& [key, cells_r] : other.table_) {
        if (!table_.contains(key)) count(absent, cells_r);
    }
    return diff;
}

}  // namespace dcmin
