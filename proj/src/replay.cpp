#include "uavtp/replay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uavtp {

Quotas quotas_for(MemoryKind kind) {
    return kind == MemoryKind::offline_large ? Quotas{0.70, 0.30} : Quotas{0.80, 0.20};
}

ReplayMemory::ReplayMemory(MemoryKind kind, std::size_t capacity) : kind_(kind), capacity_(capacity) {
    if (capacity == 0) throw std::domain_error("ReplayMemory: capacity must be positive");
}

void ReplayMemory::rebuild(std::span<const Experience> pool, std::mt19937_64& rng) {
    if (pool.empty()) throw std::domain_error("ReplayMemory::rebuild: empty pool");
    std::vector<Experience> next;
    if (pool.size() <= capacity_) {
        next.assign(pool.begin(), pool.end());
        items_ = std::move(next);
        return;
    }

    const Quotas q = quotas_for(kind_);
    const auto n_top = std::min(pool.size(), static_cast<std::size_t>(std::ceil(q.top * capacity_)));
    const auto n_rand = std::min(pool.size() - n_top,
                                 static_cast<std::size_t>(std::floor(q.random * capacity_)));

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto better = [&](std::size_t a, std::size_t b) {
        if (pool[a].reward != pool[b].reward) return pool[a].reward > pool[b].reward;
        return pool[a].sequence > pool[b].sequence;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_top), order.end(), better);

    next.reserve(n_top + n_rand);
    for (std::size_t i = 0; i < n_top; ++i) next.push_back(pool[order[i]]);

    // Partial Fisher-Yates over the remainder.
    std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(n_top), order.end());
    std::sort(rest.begin(), rest.end());
    for (std::size_t i = 0; i < n_rand; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, rest.size() - 1);
        std::swap(rest[i], rest[pick(rng)]);
        next.push_back(pool[rest[i]]);
    }
    items_ = std::move(next);
}

std::vector<Experience> ReplayMemory::sample(int b, std::mt19937_64& rng) const {
    if (b <= 0) throw std::domain_error("ReplayMemory::sample: batch size must be positive");
    if (items_.empty()) throw std::domain_error("ReplayMemory::sample: memory is empty");
    std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
    std::vector<Experience> out;
    out.reserve(static_cast<std::size_t>(b));
    for (int i = 0; i < b; ++i) out.push_back(items_[pick(rng)]);
    return out;
}

TrainBatch make_batch(std::span<const Experience> samples, double reward_scale) {
    TrainBatch batch;
    for (const auto& e : samples) {
        const int k = e.obs->k;
        NetInput in(kInputPlanes, k * k);
        write_network_input(*e.obs, in);
        NetInput next(kInputPlanes, k * k);
        write_network_input(*e.next_obs, next);
        batch.observations.push_back(std::move(in));
        batch.next_observations.push_back(std::move(next));
        batch.actions.push_back(e.action);
        batch.rewards.push_back(e.reward * reward_scale);
        batch.terminals.push_back(e.terminal);
    }
    return batch;
}

}  // namespace uavtp
