#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "uavtp/mobility.hpp"

using namespace uavtp;

namespace {
constexpr double kPi = std::numbers::pi;

bool on_compass(double heading) {
    const double q = heading / (kPi / 2.0);
    return std::abs(q - std::round(q)) < 1e-9 && heading >= 0.0 && heading < 2.0 * kPi;
}
}  // namespace

TEST_CASE("speed recursion") {
    ScenarioConfig cfg;
    CHECK(update_speed(1.0, cfg) == 1.0);
    CHECK(update_speed(2.0, cfg) == doctest::Approx(1.9).epsilon(1e-15));
    cfg.gu_inertia = 0.0;
    CHECK(update_speed(0.0, cfg) == 1.0);
}

TEST_CASE("speed contracts geometrically towards the mean") {
    ScenarioConfig cfg;
    cfg.gu_inertia = 0.7;
    cfg.gu_mean_speed = 2.5;
    double v = 10.0;
    for (int t = 1; t <= 60; ++t) {
        v = update_speed(v, cfg);
        const double expected = std::pow(0.7, t) * (10.0 - 2.5);
        CHECK(std::abs(v - 2.5) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("heading keeps direction when eps is one") {
    ScenarioConfig cfg;
    cfg.gu_greedy_eps = 1.0;
    std::mt19937_64 rng(3);
    for (double h : {0.0, kPi / 2, kPi, 3 * kPi / 2}) CHECK(update_heading(h, cfg, rng) == h);
}

TEST_CASE("heading turns uniformly over the three other directions when eps is zero") {
    ScenarioConfig cfg;
    cfg.gu_greedy_eps = 0.0;
    std::mt19937_64 rng(11);
    std::array<int, 4> hist{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double h = update_heading(0.0, cfg, rng);
        REQUIRE(on_compass(h));
        ++hist[static_cast<std::size_t>(std::lround(h / (kPi / 2)))];
    }
    CHECK(hist[0] == 0);
    for (int d = 1; d < 4; ++d) CHECK(std::abs(hist[static_cast<std::size_t>(d)] / double(n) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("heading sequence is reproducible") {
    ScenarioConfig cfg;
    std::mt19937_64 a(5), b(5);
    double ha = 0.0, hb = 0.0;
    for (int i = 0; i < 1000; ++i) {
        ha = update_heading(ha, cfg, a);
        hb = update_heading(hb, cfg, b);
        REQUIRE(ha == hb);
    }
}

TEST_CASE("step_gu moves along the heading and reflects at walls") {
    ScenarioConfig cfg;
    cfg.gu_greedy_eps = 1.0;
    std::mt19937_64 rng(1);

    GroundUser gu;
    gu.pos = {450, 450};
    gu.speed = 1.0;
    gu.heading = 0.0;
    const GroundUser moved = step_gu(gu, cfg, rng);
    CHECK(moved.pos.x == 451.0);
    CHECK(moved.pos.y == 450.0);

    gu.pos = {899.5, 450};
    const GroundUser bounced = step_gu(gu, cfg, rng);
    CHECK(bounced.pos.x == doctest::Approx(899.5));
    CHECK(bounced.pos.y == doctest::Approx(450.0));
    CHECK(bounced.heading == doctest::Approx(kPi));

    gu.pos = {10, 0.25};
    gu.heading = 3 * kPi / 2;
    const GroundUser floor_hit = step_gu(gu, cfg, rng);
    CHECK(floor_hit.pos.y == doctest::Approx(0.75));
    CHECK(floor_hit.heading == doctest::Approx(kPi / 2));

    gu.pos = {300, 300};
    gu.speed = 0.0;
    cfg.gu_mean_speed = 0.0;
    const GroundUser still = step_gu(gu, cfg, rng);
    CHECK(still.pos == gu.pos);
}

TEST_CASE("long random walks stay inside the area on the compass") {
    ScenarioConfig cfg;
    cfg.grid_k = 4;
    cfg.cell_size = 5.0;
    cfg.gu_mean_speed = 3.0;
    cfg.gu_greedy_eps = 0.6;
    std::mt19937_64 rng(2024);
    GroundUser gu;
    gu.pos = {10, 10};
    gu.speed = 7.0;
    for (int t = 0; t < 100000; ++t) {
        gu = step_gu(gu, cfg, rng);
        REQUIRE(gu.pos.x >= 0.0);
        REQUIRE(gu.pos.x <= cfg.aoi_side());
        REQUIRE(gu.pos.y >= 0.0);
        REQUIRE(gu.pos.y <= cfg.aoi_side());
        REQUIRE(on_compass(gu.heading));
    }
}
