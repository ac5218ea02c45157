#pragma once

#include <complex>
#include <random>

#include "uavtp/config.hpp"
#include "uavtp/geometry.hpp"

namespace uavtp {

/// One block-fading realization of the ground-to-UAV link.
struct ChannelSample {
    std::complex<double> small_scale{1.0, 0.0};
    double large_scale = 0.0;
    double coeff_mag = 0.0;  // sqrt(large_scale) * |small_scale|
};

/// alpha / (H^2 + d^2)^(K_ps/2) for ground-projected squared distance d^2.
double large_scale_gain(double dist2_ground, const ScenarioConfig& cfg);

/// Unit-power Rician draw: fixed LOS phasor plus a CN(0,1) scattered term.
std::complex<double> sample_small_scale(const ScenarioConfig& cfg, std::mt19937_64& rng);

ChannelSample channel_coefficient(Vec2 gu_pos, Cell uav_cell, const ScenarioConfig& cfg,
                                  std::mt19937_64& rng);

/// Achievable uplink rate in bits/s.
double rate(double coeff_mag, const ScenarioConfig& cfg);

/// QoS test through the closed-form coverage radius; equivalent to
/// sqrt(large_scale) * small_scale_mag >= h_min.
bool coverage_ok(Vec2 gu_pos, Cell uav_cell, double small_scale_mag, const ScenarioConfig& cfg);

/// Largest per-GU rate: zero ground distance and unit small-scale gain.
double reference_rate(const ScenarioConfig& cfg);

}  // namespace uavtp
