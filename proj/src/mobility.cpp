#include "uavtp/mobility.hpp"

#include <cmath>
#include <numbers>

namespace uavtp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Mirrors v into [0, side]; returns true when a wall was hit.
bool reflect(double& v, double side) {
    bool hit = false;
    // A slot never moves a GU further than one AoI side in practice; loop for safety.
    while (v < 0.0 || v > side) {
        v = v < 0.0 ? -v : 2.0 * side - v;
        hit = !hit;
    }
    return hit;
}

}  // namespace

double normalize_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (kTwoPi - a < 1e-9 || a < 1e-9) a = 0.0;
    return a;
}

double update_speed(double prev_speed, const ScenarioConfig& cfg) {
    return cfg.gu_inertia * prev_speed + (1.0 - cfg.gu_inertia) * cfg.gu_mean_speed;
}

double update_heading(double prev_heading, const ScenarioConfig& cfg, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < cfg.gu_greedy_eps) return normalize_angle(prev_heading);
    std::uniform_int_distribution<int> turn(1, 3);
    return normalize_angle(prev_heading + cfg.steer_angle * turn(rng));
}

GroundUser step_gu(GroundUser gu, const ScenarioConfig& cfg, std::mt19937_64& rng) {
    gu.speed = update_speed(gu.speed, cfg);
    gu.heading = update_heading(gu.heading, cfg, rng);

    const double dist = gu.speed * cfg.slot_tau;
    double x = gu.pos.x + dist * std::cos(gu.heading);
    double y = gu.pos.y + dist * std::sin(gu.heading);
    const double side = cfg.aoi_side();
    const bool flip_x = reflect(x, side);
    const bool flip_y = reflect(y, side);
    if (flip_x) gu.heading = normalize_angle(std::numbers::pi - gu.heading);
    if (flip_y) gu.heading = normalize_angle(-gu.heading);
    gu.pos = {x, y};
    return gu;
}

}  // namespace uavtp
