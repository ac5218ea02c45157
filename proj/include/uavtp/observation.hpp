#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "uavtp/channel.hpp"
#include "uavtp/config.hpp"
#include "uavtp/geometry.hpp"
#include "uavtp/scenario.hpp"

namespace uavtp {

/// The agent's view of one slot: coverage map, service-count map and the
/// N-step trend map, each K x K and max-normalized to [0,1]. The UAV's own
/// waypoint travels alongside for the value network's position plane.
struct Observation {
    Grid t1;
    Grid t2;
    Grid t3;
    Cell uav;
};

/// Number of input planes fed to the value network: T1, T2, T3 and a one-hot
/// plane marking the UAV waypoint.
inline constexpr int kInputPlanes = 4;

enum class Direction { Up, Down, Left, Right };

inline constexpr std::array<Direction, 4> kDirections = {Direction::Up, Direction::Down,
                                                         Direction::Left, Direction::Right};

/// Unit step of a direction on the (x, y) grid; Up is +y, Right is +x.
Offset direction_step(Direction d);

/// Detection kernels U=[1,-1]^T, D=[-1,1]^T, L=[1,-1], R=[-1,1]. Row kernels
/// place tap i at x+i; column kernels are drawn north-up, so tap 0 sits at
/// y+1 and tap 1 at the anchor row y.
std::array<double, 2> direction_kernel(Direction d);

struct DirectionResponses {
    Grid up;
    Grid down;
    Grid left;
    Grid right;

    const Grid& operator[](Direction d) const;
};

/// Divides by the largest entry; grids whose max is <= 0 pass through.
Grid max_normalize(Grid g);

Grid build_channel1(const WorldState& world, std::span<const ChannelSample> samples,
                    const ScenarioConfig& cfg);
Grid build_channel2(const WorldState& world, const ScenarioConfig& cfg);

/// Sum of buffered bits per cell.
Grid buffer_grid(const WorldState& world, const ScenarioConfig& cfg);

/// Elementwise now - prev; throws std::domain_error on a shape mismatch.
Grid diff_grid(const Grid& now, const Grid& prev);

/// SAME (zero-padded) 2-tap correlation of the difference grid with each
/// direction kernel. L/R slide along x, U/D along y. A one-cell move of
/// B bits in direction d yields 2B in the d response.
DirectionResponses detect_directions(const Grid& dg);

/// Unnormalized N-step trend propagation from the positive entries of
/// response. Stochastic mode walks one particle per seed cell; expectation
/// mode carries the full distribution. Mass leaving the grid is dropped.
Grid propagate_trend(const Grid& response, Direction dir, TrendMode mode, int steps, double gamma,
                     double eps, std::mt19937_64& rng);

/// propagate_trend with the scenario's trend settings, max-normalized.
Grid trend_matrix(const Grid& response, Direction dir, const ScenarioConfig& cfg,
                  std::mt19937_64& rng);

Grid build_channel3(const WorldState& world, const ScenarioConfig& cfg, std::mt19937_64& rng);

/// Uses world.samples for the coverage channel and rng for stochastic trends.
Observation build_observation(const WorldState& world, const ScenarioConfig& cfg,
                              std::mt19937_64& rng);

/// Plane-major network input, kInputPlanes x K^2, cell (x, y) at column x + K*y.
Eigen::MatrixXd network_input(const Observation& obs);

/// Sparse copy of an observation for replay storage.
struct PackedObservation {
    struct Channel {
        std::vector<std::uint32_t> index;
        std::vector<double> value;
    };
    int k = 0;
    Cell uav;
    std::array<Channel, 3> channels;
};

PackedObservation pack(const Observation& obs);
Observation unpack(const PackedObservation& packed);
void write_network_input(const PackedObservation& packed, Eigen::Ref<Eigen::MatrixXd> out);

}  // namespace uavtp
