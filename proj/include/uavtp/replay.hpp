#pragma once

#include <memory>
#include <random>
#include <span>
#include <vector>

#include "uavtp/observation.hpp"
#include "uavtp/qnet.hpp"

namespace uavtp {

/// One transition. Observations are shared so consecutive experiences of an
/// episode reference the same packed state.
struct Experience {
    std::shared_ptr<const PackedObservation> obs;
    int action = 0;
    double reward = 0.0;
    std::shared_ptr<const PackedObservation> next_obs;
    bool terminal = false;
    int episode = 0;
    long long sequence = 0;  // global insertion order, larger is newer
};

enum class MemoryKind { offline_large, online_small };

struct Quotas {
    double top;
    double random;
};

Quotas quotas_for(MemoryKind kind);

/// Reward-biased replay memory: the highest-reward share of a candidate pool
/// plus a uniform share of the rest, rebuilt wholesale from each new pool.
class ReplayMemory {
public:
    ReplayMemory(MemoryKind kind, std::size_t capacity);

    MemoryKind kind() const { return kind_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const std::vector<Experience>& contents() const { return items_; }

    /// Keeps the top ceil(q_top * capacity) experiences by reward (ties: newer
    /// first) plus floor(q_random * capacity) uniform draws without
    /// replacement from the remainder. Pools no larger than capacity are
    /// kept whole. Throws std::domain_error on an empty pool.
    void rebuild(std::span<const Experience> pool, std::mt19937_64& rng);

    /// Uniform draw with replacement. Throws std::domain_error for b <= 0 or
    /// an empty memory.
    std::vector<Experience> sample(int b, std::mt19937_64& rng) const;

private:
    MemoryKind kind_;
    std::size_t capacity_;
    std::vector<Experience> items_;
};

/// Expands sampled experiences into network inputs; rewards are multiplied
/// by reward_scale.
TrainBatch make_batch(std::span<const Experience> samples, double reward_scale);

}  // namespace uavtp
