#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "uavtp/channel.hpp"
#include "uavtp/config.hpp"
#include "uavtp/geometry.hpp"
#include "uavtp/mobility.hpp"
#include "uavtp/scenario.hpp"

using namespace uavtp;

TEST_CASE("cell_center maps waypoints to cell midpoints") {
    ScenarioConfig cfg;
    const Vec2 c0 = cell_center({0, 0}, cfg);
    CHECK(c0.x == 15.0);
    CHECK(c0.y == 15.0);
    const Vec2 c29 = cell_center({29, 29}, cfg);
    CHECK(c29.x == 885.0);
    CHECK(c29.y == 885.0);
    CHECK_THROWS_AS(cell_center({30, 0}, cfg), std::domain_error);
    CHECK_THROWS_AS(cell_center({0, -1}, cfg), std::domain_error);
}

TEST_CASE("pos_to_cell floors and clamps") {
    ScenarioConfig cfg;
    CHECK(pos_to_cell({15, 15}, cfg) == Cell{0, 0});
    CHECK(pos_to_cell({900, 900}, cfg) == Cell{29, 29});
    CHECK(pos_to_cell({31, 59.9}, cfg) == Cell{1, 1});
    CHECK(pos_to_cell({-0.0, 0.0}, cfg) == Cell{0, 0});
}

TEST_CASE("pos_to_cell inverts cell_center on every cell") {
    for (int k : {2, 3, 7, 30}) {
        ScenarioConfig cfg;
        cfg.grid_k = k;
        cfg.cell_size = 17.5;
        for (int x = 0; x < k; ++x)
            for (int y = 0; y < k; ++y) CHECK(pos_to_cell(cell_center({x, y}, cfg), cfg) == Cell{x, y});
    }
}

TEST_CASE("spawn_world is reproducible and seed dependent") {
    ScenarioConfig cfg;
    cfg.seed = 7;
    const WorldState a = spawn_world(cfg, 50);
    const WorldState b = spawn_world(cfg, 50);
    CHECK(a == b);
    cfg.seed = 8;
    const WorldState c = spawn_world(cfg, 50);
    bool differ = false;
    for (std::size_t i = 0; i < a.gus.size(); ++i) differ |= !(a.gus[i].pos == c.gus[i].pos);
    CHECK(differ);
    CHECK_THROWS_AS(spawn_world(cfg, 0), std::domain_error);
}

TEST_CASE("spawned world satisfies its invariants") {
    ScenarioConfig cfg;
    const WorldState w = spawn_world(cfg, 200);
    CHECK(w.uav.cell == Cell{15, 15});
    CHECK(w.slot == 0);
    CHECK(w.prev_buffer_grid.rows() == 30);
    CHECK(w.prev_buffer_grid.cols() == 30);
    CHECK(w.samples.size() == w.gus.size());
    for (const auto& gu : w.gus) {
        CHECK(gu.pos.x >= 0.0);
        CHECK(gu.pos.x <= cfg.aoi_side());
        CHECK(gu.pos.y >= 0.0);
        CHECK(gu.pos.y <= cfg.aoi_side());
        CHECK(gu.buffer_bits == 0.0);
        CHECK(gu.speed == cfg.gu_mean_speed);
        const double q = gu.heading / (std::numbers::pi / 2.0);
        CHECK(q == doctest::Approx(std::round(q)));
    }
}

TEST_CASE("random streams are independent of each other") {
    ScenarioConfig cfg;
    RngStreams plain = RngStreams::from_seed(99);
    RngStreams mixed = RngStreams::from_seed(99);
    GroundUser gu;
    gu.pos = {450, 450};
    gu.speed = 1.0;
    GroundUser g1 = gu;
    GroundUser g2 = gu;
    for (int t = 0; t < 500; ++t) {
        g1 = step_gu(g1, cfg, plain.mobility);
        // Interleave channel draws on the second run only.
        for (int j = 0; j < 3; ++j) (void)sample_small_scale(cfg, mixed.channel);
        g2 = step_gu(g2, cfg, mixed.mobility);
        CHECK(g1 == g2);
    }
    CHECK(plain.mobility == mixed.mobility);
    CHECK_FALSE(plain.channel == mixed.channel);
}

TEST_CASE("config parsing names the offending key") {
    ScenarioConfig cfg;
    std::istringstream in("grid_k = 12\n# comment\ncell_size=15.5  # trailing\ntrend_mode = stochastic\n");
    KeyValues kv = parse_key_values(in);
    apply_scenario_keys(cfg, kv);
    CHECK(kv.empty());
    CHECK(cfg.grid_k == 12);
    CHECK(cfg.cell_size == 15.5);
    CHECK(cfg.trend_mode == TrendMode::stochastic);

    KeyValues bad{{"altitude_h", "high"}};
    try {
        apply_scenario_keys(cfg, bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "altitude_h");
    }

    cfg.gu_inertia = 1.5;
    try {
        validate(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "gu_inertia");
    }
    cfg = {};
    cfg.hover_tau_c = 2.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("written config keys round-trip") {
    ScenarioConfig cfg;
    cfg.steer_angle = 1.0 / 3.0;
    cfg.seed = 18446744073709551615ull;
    cfg.trend_mode = TrendMode::stochastic;
    std::ostringstream out;
    write_scenario_keys(out, cfg);
    std::istringstream in(out.str());
    KeyValues kv = parse_key_values(in);
    ScenarioConfig back;
    apply_scenario_keys(back, kv);
    CHECK(kv.empty());
    CHECK(back.steer_angle == cfg.steer_angle);
    CHECK(back.seed == cfg.seed);
    CHECK(back.trend_mode == TrendMode::stochastic);
    CHECK(back.noise_sigma2 == 1e-18);
}
