#include "uavtp/channel.hpp"

#include <cmath>

namespace uavtp {

double large_scale_gain(double dist2_ground, const ScenarioConfig& cfg) {
    const double h2 = cfg.altitude_h * cfg.altitude_h;
    return cfg.ref_gain_alpha / std::pow(h2 + dist2_ground, cfg.pathloss_kps / 2.0);
}

std::complex<double> sample_small_scale(const ScenarioConfig& cfg, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    const double re = gauss(rng);
    const double im = gauss(rng);
    const double ks = cfg.rician_ks;
    const double los_w = std::sqrt(ks / (ks + 1.0));
    const double nlos_w = std::sqrt(1.0 / (ks + 1.0));
    return std::complex<double>(los_w, 0.0) + nlos_w * std::complex<double>(re, im);
}

ChannelSample channel_coefficient(Vec2 gu_pos, Cell uav_cell, const ScenarioConfig& cfg,
                                  std::mt19937_64& rng) {
    ChannelSample s;
    s.large_scale = large_scale_gain(squared_distance(gu_pos, cell_center(uav_cell, cfg)), cfg);
    s.small_scale = sample_small_scale(cfg, rng);
    s.coeff_mag = std::sqrt(s.large_scale) * std::abs(s.small_scale);
    return s;
}

double rate(double coeff_mag, const ScenarioConfig& cfg) {
    return cfg.bandwidth_w * std::log2(1.0 + coeff_mag * coeff_mag * cfg.tx_power / cfg.noise_sigma2);
}

bool coverage_ok(Vec2 gu_pos, Cell uav_cell, double small_scale_mag, const ScenarioConfig& cfg) {
    const double d2 = squared_distance(gu_pos, cell_center(uav_cell, cfg));
    const double ratio = cfg.ref_gain_alpha * small_scale_mag * small_scale_mag / (cfg.h_min * cfg.h_min);
    const double radius2 = std::pow(ratio, 2.0 / cfg.pathloss_kps) - cfg.altitude_h * cfg.altitude_h;
    return d2 <= radius2;
}

double reference_rate(const ScenarioConfig& cfg) {
    return rate(std::sqrt(large_scale_gain(0.0, cfg)), cfg);
}

}  // namespace uavtp
