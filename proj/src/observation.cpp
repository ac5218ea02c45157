#include "uavtp/observation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavtp {

Offset direction_step(Direction d) {
    switch (d) {
        case Direction::Up: return {0, 1};
        case Direction::Down: return {0, -1};
        case Direction::Left: return {-1, 0};
        case Direction::Right: return {1, 0};
    }
    throw std::invalid_argument("unknown direction");
}

std::array<double, 2> direction_kernel(Direction d) {
    switch (d) {
        case Direction::Up: return {1.0, -1.0};
        case Direction::Down: return {-1.0, 1.0};
        case Direction::Left: return {1.0, -1.0};
        case Direction::Right: return {-1.0, 1.0};
    }
    throw std::invalid_argument("unknown direction");
}

const Grid& DirectionResponses::operator[](Direction d) const {
    switch (d) {
        case Direction::Up: return up;
        case Direction::Down: return down;
        case Direction::Left: return left;
        case Direction::Right: return right;
    }
    throw std::invalid_argument("unknown direction");
}

Grid max_normalize(Grid g) {
    if (g.size() == 0) return g;
    const double peak = g.maxCoeff();
    if (peak > 0.0) g /= peak;
    return g;
}

Grid build_channel1(const WorldState& world, std::span<const ChannelSample> samples,
                    const ScenarioConfig& cfg) {
    if (samples.size() != world.gus.size()) {
        throw std::invalid_argument("build_channel1: need one channel sample per GU");
    }
    Grid t1 = zero_grid(cfg.grid_k);
    for (std::size_t i = 0; i < world.gus.size(); ++i) {
        const auto& gu = world.gus[i];
        if (!coverage_ok(gu.pos, world.uav.cell, std::abs(samples[i].small_scale), cfg)) continue;
        const Cell c = pos_to_cell(gu.pos, cfg);
        t1(c.col, c.row) += samples[i].coeff_mag;
    }
    return max_normalize(std::move(t1));
}

Grid build_channel2(const WorldState& world, const ScenarioConfig& cfg) {
    Grid t2 = zero_grid(cfg.grid_k);
    for (const auto& gu : world.gus) {
        const Cell c = pos_to_cell(gu.pos, cfg);
        t2(c.col, c.row) += static_cast<double>(gu.served_count);
    }
    return max_normalize(std::move(t2));
}

Grid buffer_grid(const WorldState& world, const ScenarioConfig& cfg) {
    Grid g = zero_grid(cfg.grid_k);
    for (const auto& gu : world.gus) {
        const Cell c = pos_to_cell(gu.pos, cfg);
        g(c.col, c.row) += gu.buffer_bits;
    }
    return g;
}

Grid diff_grid(const Grid& now, const Grid& prev) {
    if (now.rows() != prev.rows() || now.cols() != prev.cols()) {
        throw std::domain_error("diff_grid: dimension mismatch");
    }
    return now - prev;
}

DirectionResponses detect_directions(const Grid& dg) {
    const Eigen::Index nx = dg.rows();
    const Eigen::Index ny = dg.cols();
    DirectionResponses out{Grid::Zero(nx, ny), Grid::Zero(nx, ny), Grid::Zero(nx, ny),
                           Grid::Zero(nx, ny)};
    // next_x / next_y: neighbour along the axis, zero beyond the edge
    for (Eigen::Index y = 0; y < ny; ++y) {
        for (Eigen::Index x = 0; x < nx; ++x) {
            const double here = dg(x, y);
            const double next_x = x + 1 < nx ? dg(x + 1, y) : 0.0;
            const double next_y = y + 1 < ny ? dg(x, y + 1) : 0.0;
            out.right(x, y) = -here + next_x;
            out.left(x, y) = here - next_x;
            out.up(x, y) = next_y - here;
            out.down(x, y) = -next_y + here;
        }
    }
    return out;
}

namespace {

// Expectation-mode propagation of one seed inside a (2N+1)^2 window.
void propagate_seed_expectation(Grid& acc, int sx, int sy, double mass, Direction forward, int steps,
                                double gamma, double eps) {
    const int k_x = static_cast<int>(acc.rows());
    const int k_y = static_cast<int>(acc.cols());
    const int side = 2 * steps + 1;
    Eigen::MatrixXd cur = Eigen::MatrixXd::Zero(side, side);
    Eigen::MatrixXd next(side, side);
    cur(steps, steps) = mass;

    std::array<double, 4> weight{};
    for (std::size_t d = 0; d < kDirections.size(); ++d) {
        weight[d] = kDirections[d] == forward ? gamma * eps : gamma * (1.0 - eps) / 3.0;
    }

    for (int n = 1; n <= steps; ++n) {
        next.setZero();
        const int r = n - 1;  // support radius before this step
        for (int wy = steps - r; wy <= steps + r; ++wy) {
            for (int wx = steps - r; wx <= steps + r; ++wx) {
                const double v = cur(wx, wy);
                if (v == 0.0) continue;
                for (std::size_t d = 0; d < kDirections.size(); ++d) {
                    if (weight[d] == 0.0) continue;
                    const Offset o = direction_step(kDirections[d]);
                    const int gx = sx + wx - steps + o.dx;
                    const int gy = sy + wy - steps + o.dy;
                    if (gx < 0 || gy < 0 || gx >= k_x || gy >= k_y) continue;
                    next(wx + o.dx, wy + o.dy) += weight[d] * v;
                }
            }
        }
        for (int wy = steps - n; wy <= steps + n; ++wy) {
            for (int wx = steps - n; wx <= steps + n; ++wx) {
                const double v = next(wx, wy);
                if (v == 0.0) continue;
                acc(sx + wx - steps, sy + wy - steps) += v;
            }
        }
        std::swap(cur, next);
    }
}

void propagate_seed_walker(Grid& acc, int sx, int sy, double mass, Direction forward, int steps,
                           double gamma, double eps, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick_other(0, 2);
    std::array<Direction, 3> others{};
    std::size_t j = 0;
    for (Direction d : kDirections) {
        if (d != forward) others[j++] = d;
    }

    const int k_x = static_cast<int>(acc.rows());
    const int k_y = static_cast<int>(acc.cols());
    int x = sx;
    int y = sy;
    double value = mass;
    for (int n = 1; n <= steps; ++n) {
        const Direction d = unit(rng) < eps ? forward : others[pick_other(rng)];
        const Offset o = direction_step(d);
        x += o.dx;
        y += o.dy;
        if (x < 0 || y < 0 || x >= k_x || y >= k_y) return;
        value *= gamma;
        acc(x, y) += value;
    }
}

}  // namespace

Grid propagate_trend(const Grid& response, Direction dir, TrendMode mode, int steps, double gamma,
                     double eps, std::mt19937_64& rng) {
    Grid acc = response.cwiseMax(0.0);
    const Grid seeds = acc;
    for (Eigen::Index y = 0; y < seeds.cols(); ++y) {
        for (Eigen::Index x = 0; x < seeds.rows(); ++x) {
            const double m0 = seeds(x, y);
            if (m0 <= 0.0) continue;
            if (mode == TrendMode::expectation) {
                propagate_seed_expectation(acc, static_cast<int>(x), static_cast<int>(y), m0, dir,
                                           steps, gamma, eps);
            } else {
                propagate_seed_walker(acc, static_cast<int>(x), static_cast<int>(y), m0, dir, steps,
                                      gamma, eps, rng);
            }
        }
    }
    return acc;
}

Grid trend_matrix(const Grid& response, Direction dir, const ScenarioConfig& cfg,
                  std::mt19937_64& rng) {
    return max_normalize(propagate_trend(response, dir, cfg.trend_mode, cfg.trend_steps,
                                         cfg.effective_trend_gamma(), cfg.gu_greedy_eps, rng));
}

Grid build_channel3(const WorldState& world, const ScenarioConfig& cfg, std::mt19937_64& rng) {
    const Grid dg = diff_grid(buffer_grid(world, cfg), world.prev_buffer_grid);
    const DirectionResponses resp = detect_directions(dg);
    Grid t3 = zero_grid(cfg.grid_k);
    for (Direction d : kDirections) t3 += trend_matrix(resp[d], d, cfg, rng);
    return max_normalize(std::move(t3));
}

Observation build_observation(const WorldState& world, const ScenarioConfig& cfg,
                              std::mt19937_64& rng) {
    return {build_channel1(world, world.samples, cfg), build_channel2(world, cfg),
            build_channel3(world, cfg, rng), world.uav.cell};
}

Eigen::MatrixXd network_input(const Observation& obs) {
    const Eigen::Index k = obs.t1.rows();
    Eigen::MatrixXd in(kInputPlanes, k * k);
    in.row(0) = Eigen::Map<const Eigen::RowVectorXd>(obs.t1.data(), k * k);
    in.row(1) = Eigen::Map<const Eigen::RowVectorXd>(obs.t2.data(), k * k);
    in.row(2) = Eigen::Map<const Eigen::RowVectorXd>(obs.t3.data(), k * k);
    in.row(3).setZero();
    in(3, obs.uav.col + k * obs.uav.row) = 1.0;
    return in;
}

PackedObservation pack(const Observation& obs) {
    PackedObservation p;
    p.k = static_cast<int>(obs.t1.rows());
    p.uav = obs.uav;
    const std::array<const Grid*, 3> grids{&obs.t1, &obs.t2, &obs.t3};
    for (std::size_t c = 0; c < grids.size(); ++c) {
        const Grid& g = *grids[c];
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            if (g.data()[i] != 0.0) {
                p.channels[c].index.push_back(static_cast<std::uint32_t>(i));
                p.channels[c].value.push_back(g.data()[i]);
            }
        }
    }
    return p;
}

Observation unpack(const PackedObservation& p) {
    Observation obs{zero_grid(p.k), zero_grid(p.k), zero_grid(p.k), p.uav};
    const std::array<Grid*, 3> grids{&obs.t1, &obs.t2, &obs.t3};
    for (std::size_t c = 0; c < grids.size(); ++c) {
        const auto& ch = p.channels[c];
        for (std::size_t j = 0; j < ch.index.size(); ++j) grids[c]->data()[ch.index[j]] = ch.value[j];
    }
    return obs;
}

void write_network_input(const PackedObservation& p, Eigen::Ref<Eigen::MatrixXd> out) {
    out.setZero();
    for (std::size_t c = 0; c < p.channels.size(); ++c) {
        const auto& ch = p.channels[c];
        for (std::size_t j = 0; j < ch.index.size(); ++j) out(static_cast<Eigen::Index>(c), ch.index[j]) = ch.value[j];
    }
    out(3, p.uav.col + p.k * p.uav.row) = 1.0;
}

}  // namespace uavtp
