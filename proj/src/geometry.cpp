#include "uavtp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uavtp {

bool in_grid(Cell c, int k) { return c.col >= 0 && c.row >= 0 && c.col < k && c.row < k; }

Vec2 cell_center(Cell c, const ScenarioConfig& cfg) {
    if (!in_grid(c, cfg.grid_k)) {
        throw std::domain_error("cell (" + std::to_string(c.col) + "," + std::to_string(c.row) +
                                ") outside a " + std::to_string(cfg.grid_k) + "x" +
                                std::to_string(cfg.grid_k) + " grid");
    }
    return {(c.col + 0.5) * cfg.cell_size, (c.row + 0.5) * cfg.cell_size};
}

Cell pos_to_cell(Vec2 pos, const ScenarioConfig& cfg) {
    const auto index = [&](double v) {
        const double f = std::floor(v / cfg.cell_size);
        return static_cast<int>(std::clamp(f, 0.0, static_cast<double>(cfg.grid_k - 1)));
    };
    return {index(pos.x), index(pos.y)};
}

double squared_distance(Vec2 a, Vec2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

}  // namespace uavtp
