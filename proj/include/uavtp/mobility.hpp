#pragma once

#include <random>

#include "uavtp/config.hpp"
#include "uavtp/scenario.hpp"

namespace uavtp {

/// Inertial speed recursion: k1 * prev + (1 - k1) * mean speed.
double update_speed(double prev_speed, const ScenarioConfig& cfg);

/// Keeps the heading with probability gu_greedy_eps, otherwise turns by
/// steer_angle * k2 with k2 uniform over {1, 2, 3}. Result lies in [0, 2*pi).
double update_heading(double prev_heading, const ScenarioConfig& cfg, std::mt19937_64& rng);

/// Advances one GU by one slot. Walls of the area reflect the position and
/// flip the heading component normal to the wall.
GroundUser step_gu(GroundUser gu, const ScenarioConfig& cfg, std::mt19937_64& rng);

/// Wraps an angle into [0, 2*pi), snapping values within 1e-9 of 2*pi to 0.
double normalize_angle(double a);

}  // namespace uavtp
