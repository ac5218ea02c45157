#include "uavtp/scenario.hpp"

#include <array>
#include <numbers>
#include <stdexcept>

#include "uavtp/observation.hpp"

namespace uavtp {

namespace {

enum StreamTag : std::uint64_t { kMobility = 1, kChannel = 2, kTrend = 3, kAgent = 4 };

std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t tag) {
    return std::mt19937_64(derive_seed(master, tag));
}

GroundUser place_user(int id, const ScenarioConfig& cfg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> coord(0.0, cfg.aoi_side());
    std::uniform_int_distribution<int> quadrant(0, 3);
    GroundUser gu;
    gu.id = id;
    gu.pos.x = coord(rng);
    gu.pos.y = coord(rng);
    gu.heading = quadrant(rng) * (std::numbers::pi / 2.0);
    gu.speed = cfg.gu_mean_speed;
    return gu;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

RngStreams RngStreams::from_seed(std::uint64_t master_seed) {
    return {make_stream(master_seed, kMobility), make_stream(master_seed, kChannel),
            make_stream(master_seed, kTrend), make_stream(master_seed, kAgent)};
}

WorldState spawn_world(const ScenarioConfig& cfg, int n_gus) {
    if (n_gus < 1) throw std::domain_error("spawn_world: n_gus must be >= 1");
    WorldState world;
    world.rng = RngStreams::from_seed(cfg.seed);
    world.uav.cell = {cfg.grid_k / 2, cfg.grid_k / 2};
    world.gus.reserve(n_gus);
    for (int i = 0; i < n_gus; ++i) world.gus.push_back(place_user(i, cfg, world.rng.mobility));
    world.samples.reserve(n_gus);
    for (const auto& gu : world.gus) {
        world.samples.push_back(channel_coefficient(gu.pos, world.uav.cell, cfg, world.rng.channel));
    }
    world.prev_buffer_grid = buffer_grid(world, cfg);
    return world;
}

bool operator==(const WorldState& a, const WorldState& b) {
    const auto same_samples = [](const std::vector<ChannelSample>& x, const std::vector<ChannelSample>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i].small_scale != y[i].small_scale || x[i].large_scale != y[i].large_scale ||
                x[i].coeff_mag != y[i].coeff_mag) {
                return false;
            }
        }
        return true;
    };
    return a.slot == b.slot && a.uav == b.uav && a.gus == b.gus && a.done == b.done &&
           a.prev_buffer_grid.rows() == b.prev_buffer_grid.rows() &&
           a.prev_buffer_grid.cols() == b.prev_buffer_grid.cols() &&
           a.prev_buffer_grid == b.prev_buffer_grid && same_samples(a.samples, b.samples) && a.rng == b.rng;
}

}  // namespace uavtp
