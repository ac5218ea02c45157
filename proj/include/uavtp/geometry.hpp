#pragma once

#include <compare>

#include <Eigen/Core>

#include "uavtp/config.hpp"

namespace uavtp {

/// Continuous ground position in meters. x grows east, y grows north.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Grid waypoint index: col along x, row along y.
struct Cell {
    int col = 0;
    int row = 0;

    friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Offset {
    int dx;
    int dy;
};

/// K x K real matrix addressed as grid(col, row), i.e. grid(x, y).
using Grid = Eigen::MatrixXd;

inline Grid zero_grid(int k) { return Grid::Zero(k, k); }

bool in_grid(Cell c, int k);

/// Center of a waypoint cell. Throws std::domain_error for cells outside the grid.
Vec2 cell_center(Cell c, const ScenarioConfig& cfg);

/// Cell containing pos; positions on or beyond the boundary clamp to the edge cells.
Cell pos_to_cell(Vec2 pos, const ScenarioConfig& cfg);

double squared_distance(Vec2 a, Vec2 b);

}  // namespace uavtp
