#include "uavtp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <vector>

namespace uavtp {

std::string_view to_string(TrendMode mode) {
    return mode == TrendMode::stochastic ? "stochastic" : "expectation";
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Field {
    const char* key;
    std::function<void(ScenarioConfig&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

#define UAVTP_DOUBLE_FIELD(name)                                                          \
    Field{#name, [](ScenarioConfig& c, const std::string& v) { c.name = parse_double(#name, v); }, \
          [](const ScenarioConfig& c) { return format_double(c.name); }}
#define UAVTP_INT_FIELD(name)                                                                   \
    Field{#name,                                                                                \
          [](ScenarioConfig& c, const std::string& v) { c.name = static_cast<int>(parse_int(#name, v)); }, \
          [](const ScenarioConfig& c) { return std::to_string(c.name); }}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        UAVTP_INT_FIELD(grid_k),
        UAVTP_DOUBLE_FIELD(cell_size),
        UAVTP_DOUBLE_FIELD(altitude_h),
        UAVTP_DOUBLE_FIELD(uav_speed),
        UAVTP_DOUBLE_FIELD(gu_mean_speed),
        UAVTP_DOUBLE_FIELD(gu_inertia),
        UAVTP_DOUBLE_FIELD(steer_angle),
        UAVTP_DOUBLE_FIELD(gu_greedy_eps),
        UAVTP_DOUBLE_FIELD(fly_power),
        UAVTP_DOUBLE_FIELD(energy_budget),
        UAVTP_DOUBLE_FIELD(slot_tau),
        UAVTP_DOUBLE_FIELD(hover_tau_c),
        UAVTP_DOUBLE_FIELD(bandwidth_w),
        UAVTP_DOUBLE_FIELD(tx_power),
        UAVTP_DOUBLE_FIELD(noise_sigma2),
        UAVTP_DOUBLE_FIELD(ref_gain_alpha),
        UAVTP_DOUBLE_FIELD(pathloss_kps),
        UAVTP_DOUBLE_FIELD(rician_ks),
        UAVTP_DOUBLE_FIELD(h_min),
        UAVTP_DOUBLE_FIELD(arrival_bits),
        UAVTP_DOUBLE_FIELD(agent_eta),
        UAVTP_DOUBLE_FIELD(discount_gamma),
        UAVTP_INT_FIELD(trend_steps),
        UAVTP_DOUBLE_FIELD(trend_gamma),
        Field{"trend_mode",
              [](ScenarioConfig& c, const std::string& v) {
                  if (v == "stochastic") c.trend_mode = TrendMode::stochastic;
                  else if (v == "expectation") c.trend_mode = TrendMode::expectation;
                  else throw ConfigError("trend_mode", "trend_mode: expected 'stochastic' or 'expectation', got '" + v + "'");
              },
              [](const ScenarioConfig& c) { return std::string(to_string(c.trend_mode)); }},
        UAVTP_INT_FIELD(max_steps_per_episode),
        Field{"seed",
              [](ScenarioConfig& c, const std::string& v) {
                  try {
                      std::size_t pos = 0;
                      c.seed = std::stoull(v, &pos);
                      if (pos != v.size()) throw std::invalid_argument(v);
                  } catch (const std::exception&) {
                      throw ConfigError("seed", "seed: expected unsigned integer, got '" + v + "'");
                  }
              },
              [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
        UAVTP_INT_FIELD(num_gus),
    };
    return table;
}

#undef UAVTP_DOUBLE_FIELD
#undef UAVTP_INT_FIELD

void require(bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(key, std::string(key) + ": " + what);
}

}  // namespace

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, key + ": expected a number, got '" + text + "'");
    }
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

long long parse_int(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, key + ": expected an integer, got '" + text + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key, key + ": expected a boolean, got '" + text + "'");
}

void validate(const ScenarioConfig& c) {
    require(c.grid_k >= 2, "grid_k", "must be >= 2");
    require(c.cell_size > 0, "cell_size", "must be positive");
    require(c.altitude_h > 0, "altitude_h", "must be positive");
    require(c.uav_speed > 0, "uav_speed", "must be positive");
    require(c.gu_mean_speed >= 0, "gu_mean_speed", "must be non-negative");
    require(c.gu_inertia >= 0 && c.gu_inertia <= 1, "gu_inertia", "must lie in [0,1]");
    require(c.gu_greedy_eps >= 0 && c.gu_greedy_eps <= 1, "gu_greedy_eps", "must lie in [0,1]");
    require(c.fly_power > 0, "fly_power", "must be positive");
    require(c.energy_budget > 0, "energy_budget", "must be positive");
    require(c.slot_tau > 0, "slot_tau", "must be positive");
    require(c.hover_tau_c > 0 && c.hover_tau_c < c.slot_tau, "hover_tau_c",
            "must be positive and smaller than slot_tau");
    require(c.bandwidth_w > 0, "bandwidth_w", "must be positive");
    require(c.tx_power > 0, "tx_power", "must be positive");
    require(c.noise_sigma2 > 0, "noise_sigma2", "must be positive");
    require(c.ref_gain_alpha >= 0, "ref_gain_alpha", "must be non-negative");
    require(c.pathloss_kps > 0, "pathloss_kps", "must be positive");
    require(c.rician_ks >= 0, "rician_ks", "must be non-negative");
    require(c.h_min > 0, "h_min", "must be positive");
    require(c.arrival_bits >= 0, "arrival_bits", "must be non-negative");
    require(c.agent_eta >= 0 && c.agent_eta <= 1, "agent_eta", "must lie in [0,1]");
    require(c.discount_gamma > 0 && c.discount_gamma < 1, "discount_gamma", "must lie in (0,1)");
    require(c.trend_steps >= 0, "trend_steps", "must be non-negative");
    require(c.trend_gamma < 0 || (c.trend_gamma > 0 && c.trend_gamma < 1), "trend_gamma",
            "must lie in (0,1), or be negative to follow discount_gamma");
    require(c.max_steps_per_episode > 0, "max_steps_per_episode", "must be positive");
    require(c.num_gus > 0, "num_gus", "must be positive");
}

KeyValues parse_key_values(std::istream& in) {
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(line, "line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

KeyValues read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file '" + path + "'");
    return parse_key_values(in);
}

void apply_scenario_keys(ScenarioConfig& cfg, KeyValues& kv) {
    for (const auto& f : fields()) {
        if (auto it = kv.find(f.key); it != kv.end()) {
            f.set(cfg, it->second);
            kv.erase(it);
        }
    }
}

void write_scenario_keys(std::ostream& out, const ScenarioConfig& cfg) {
    for (const auto& f : fields()) out << f.key << " = " << f.get(cfg) << '\n';
}

}  // namespace uavtp
