#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "uavtp/config.hpp"
#include "uavtp/scenario.hpp"

namespace uavtp {

enum class Action : int {
    Up = 0,
    Down,
    Left,
    Right,
    RightUpper,
    RightLower,
    LeftUpper,
    LeftLower,
};

inline constexpr int kNumActions = 8;

/// Unit cell offset of an action (Up = +y, Right = +x).
Offset action_offset(Action a);
std::string_view to_string(Action a);
Action action_from_index(int index);

enum class DoneReason { none, energy_exhausted, max_steps };

std::string_view to_string(DoneReason r);

struct StepOutcome {
    double reward = 0.0;
    double utility = 0.0;
    double fairness = 0.0;
    std::vector<int> served_ids;
    double throughput_bits = 0.0;  // sum over served GUs of r_i * tau_c
    double energy_spent = 0.0;
    bool done = false;
    DoneReason done_reason = DoneReason::none;
};

/// Raised when stepping a world that already reached a terminal slot.
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Jain's index (sum c)^2 / (n * sum c^2); 0 when every count is 0.
/// Throws std::domain_error on an empty list.
double jain_fairness(std::span<const long long> counts);

/// Flight energy of the move from -> to at constant speed.
double flight_energy(Cell from, Cell to, const ScenarioConfig& cfg);

/// Advances the world by one slot under the given UAV action.
StepOutcome step(WorldState& world, Action action, const ScenarioConfig& cfg);

double discounted_return(std::span<const double> rewards, double gamma);

}  // namespace uavtp
