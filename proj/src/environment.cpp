#include "uavtp/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uavtp/channel.hpp"
#include "uavtp/mobility.hpp"
#include "uavtp/observation.hpp"

namespace uavtp {

Offset action_offset(Action a) {
    switch (a) {
        case Action::Up: return {0, 1};
        case Action::Down: return {0, -1};
        case Action::Left: return {-1, 0};
        case Action::Right: return {1, 0};
        case Action::RightUpper: return {1, 1};
        case Action::RightLower: return {1, -1};
        case Action::LeftUpper: return {-1, 1};
        case Action::LeftLower: return {-1, -1};
    }
    throw std::invalid_argument("unknown action");
}

std::string_view to_string(Action a) {
    static constexpr std::array<std::string_view, kNumActions> names = {
        "up", "down", "left", "right", "right_upper", "right_lower", "left_upper", "left_lower"};
    return names.at(static_cast<std::size_t>(a));
}

Action action_from_index(int index) {
    if (index < 0 || index >= kNumActions) {
        throw std::out_of_range("action index " + std::to_string(index) + " outside [0,8)");
    }
    return static_cast<Action>(index);
}

std::string_view to_string(DoneReason r) {
    switch (r) {
        case DoneReason::energy_exhausted: return "energy_exhausted";
        case DoneReason::max_steps: return "max_steps";
        case DoneReason::none: break;
    }
    return "none";
}

double jain_fairness(std::span<const long long> counts) {
    if (counts.empty()) throw std::domain_error("jain_fairness: empty count list");
    double sum = 0.0;
    double sum_sq = 0.0;
    for (long long c : counts) {
        sum += static_cast<double>(c);
        sum_sq += static_cast<double>(c) * static_cast<double>(c);
    }
    if (sum_sq == 0.0) return 0.0;
    return sum * sum / (static_cast<double>(counts.size()) * sum_sq);
}

double flight_energy(Cell from, Cell to, const ScenarioConfig& cfg) {
    const double dx = to.col - from.col;
    const double dy = to.row - from.row;
    const double meters = std::sqrt(dx * dx + dy * dy) * cfg.cell_size;
    return cfg.fly_power * meters / cfg.uav_speed;
}

StepOutcome step(WorldState& world, Action action, const ScenarioConfig& cfg) {
    if (world.done) throw UsageError("step: world is terminal");

    StepOutcome out;
    world.prev_buffer_grid = buffer_grid(world, cfg);

    // UAV move, clipped to the grid.
    const Offset off = action_offset(action);
    const Cell from = world.uav.cell;
    const Cell to{std::clamp(from.col + off.dx, 0, cfg.grid_k - 1),
                  std::clamp(from.row + off.dy, 0, cfg.grid_k - 1)};
    out.energy_spent = flight_energy(from, to, cfg);
    world.uav.cell = to;
    world.uav.energy_used += out.energy_spent;

    for (auto& gu : world.gus) gu = step_gu(gu, cfg, world.rng.mobility);

    world.samples.clear();
    for (const auto& gu : world.gus) {
        world.samples.push_back(channel_coefficient(gu.pos, to, cfg, world.rng.channel));
    }

    double raw_throughput = 0.0;
    for (std::size_t i = 0; i < world.gus.size(); ++i) {
        auto& gu = world.gus[i];
        const auto& s = world.samples[i];
        const bool served = coverage_ok(gu.pos, to, std::abs(s.small_scale), cfg);
        const double available = gu.buffer_bits + cfg.arrival_bits;
        if (served) {
            const double bits = rate(s.coeff_mag, cfg) * cfg.hover_tau_c;
            raw_throughput += bits;
            gu.buffer_bits = std::max(0.0, available - bits);
            ++gu.served_count;
            out.served_ids.push_back(gu.id);
        } else {
            gu.buffer_bits = available;
        }
    }

    std::vector<long long> counts;
    counts.reserve(world.gus.size());
    for (const auto& gu : world.gus) counts.push_back(gu.served_count);
    out.fairness = jain_fairness(counts);
    out.throughput_bits = raw_throughput;
    out.utility = out.fairness * raw_throughput;

    const bool within_budget = world.uav.energy_used <= cfg.energy_budget;
    out.reward = (!out.served_ids.empty() && within_budget) ? out.utility : 0.0;

    ++world.slot;
    if (!within_budget) {
        out.done = true;
        out.done_reason = DoneReason::energy_exhausted;
    } else if (world.slot >= cfg.max_steps_per_episode) {
        out.done = true;
        out.done_reason = DoneReason::max_steps;
    }
    world.done = out.done;
    return out;
}

double discounted_return(std::span<const double> rewards, double gamma) {
    double total = 0.0;
    double weight = 1.0;
    for (double r : rewards) {
        total += weight * r;
        weight *= gamma;
    }
    return total;
}

}  // namespace uavtp
