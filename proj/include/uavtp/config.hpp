#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uavtp {

enum class TrendMode { stochastic, expectation };

std::string_view to_string(TrendMode mode);

/// Raised for malformed or invalid configuration; key() names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Physical and learning constants of one scenario. Defaults are the
/// reference simulation setup; SI units throughout.
struct ScenarioConfig {
    int grid_k = 30;
    double cell_size = 30.0;
    double altitude_h = 40.0;

    double uav_speed = 30.0;
    double gu_mean_speed = 1.0;
    double gu_inertia = 0.9;
    double steer_angle = std::numbers::pi / 2.0;
    double gu_greedy_eps = 0.9;

    double fly_power = 110.0;
    double energy_budget = 1.0e7;  // 10^4 kJ

    double slot_tau = 1.0;
    double hover_tau_c = 0.1;

    double bandwidth_w = 2.0e6;
    double tx_power = 0.1;
    double noise_sigma2 = 1.0e-18;  // sigma = 1e-9
    double ref_gain_alpha = 1.0e-5;
    double pathloss_kps = 2.0;
    double rician_ks = 1.0;
    double h_min = 2.5e-9;

    double arrival_bits = 5.0e-3;

    double agent_eta = 0.9;
    double discount_gamma = 0.9;

    int trend_steps = 3;
    // Negative means "same as discount_gamma".
    double trend_gamma = -1.0;
    TrendMode trend_mode = TrendMode::expectation;

    int max_steps_per_episode = 3000;
    std::uint64_t seed = 1;

    int num_gus = 50;

    double aoi_side() const { return grid_k * cell_size; }
    double effective_trend_gamma() const {
        return trend_gamma < 0.0 ? discount_gamma : trend_gamma;
    }
};

/// Throws ConfigError naming the first violated field.
void validate(const ScenarioConfig& cfg);

/// Flat key/value view of a configuration file ("key = value", '#' comments).
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::string& path);

/// Applies every key that names a ScenarioConfig field and removes it from kv.
void apply_scenario_keys(ScenarioConfig& cfg, KeyValues& kv);

/// Writes every ScenarioConfig field in the key/value format, full precision.
void write_scenario_keys(std::ostream& out, const ScenarioConfig& cfg);

double parse_double(const std::string& key, const std::string& text);
/// Shortest decimal text that parses back to exactly v.
std::string format_double(double v);
long long parse_int(const std::string& key, const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);

}  // namespace uavtp
