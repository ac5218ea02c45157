#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "uavtp/channel.hpp"
#include "uavtp/config.hpp"
#include "uavtp/geometry.hpp"

namespace uavtp {

struct GroundUser {
    int id = 0;
    Vec2 pos;
    double speed = 0.0;
    double heading = 0.0;  // radians, [0, 2*pi)
    double buffer_bits = 0.0;
    long long served_count = 0;

    friend bool operator==(const GroundUser&, const GroundUser&) = default;
};

struct UavState {
    Cell cell;
    double energy_used = 0.0;

    friend bool operator==(const UavState&, const UavState&) = default;
};

/// Independent generators split from one master seed so each stochastic
/// source can be varied or replayed on its own.
struct RngStreams {
    std::mt19937_64 mobility;
    std::mt19937_64 channel;
    std::mt19937_64 trend;
    std::mt19937_64 agent;

    static RngStreams from_seed(std::uint64_t master_seed);

    friend bool operator==(const RngStreams&, const RngStreams&) = default;
};

/// Derives an independent generator seed from (master, stream tag, index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index = 0);

struct WorldState {
    int slot = 0;
    UavState uav;
    std::vector<GroundUser> gus;
    Grid prev_buffer_grid;                     // buffer grid of the previous slot
    std::vector<ChannelSample> samples;        // this slot's draw, one per GU
    RngStreams rng;
    bool done = false;

    friend bool operator==(const WorldState& a, const WorldState& b);
};

/// Uniform GU placement, empty buffers, UAV at the grid center, one initial
/// channel draw. Throws std::domain_error when n_gus < 1.
WorldState spawn_world(const ScenarioConfig& cfg, int n_gus);

}  // namespace uavtp
