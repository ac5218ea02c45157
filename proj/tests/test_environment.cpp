#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "uavtp/environment.hpp"
#include "uavtp/observation.hpp"

using namespace uavtp;

namespace {

// One GU parked at the UAV's cell center with a line-of-sight channel.
WorldState static_world(ScenarioConfig& cfg) {
    cfg.rician_ks = 1e12;
    cfg.gu_mean_speed = 0.0;
    WorldState w = spawn_world(cfg, 1);
    w.gus[0].speed = 0.0;
    w.gus[0].pos = cell_center(w.uav.cell, cfg);
    return w;
}

}  // namespace

TEST_CASE("action offsets") {
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i < kNumActions; ++i) {
        const Offset o = action_offset(action_from_index(i));
        CHECK(std::abs(o.dx) <= 1);
        CHECK(std::abs(o.dy) <= 1);
        CHECK((o.dx != 0 || o.dy != 0));
        seen.insert({o.dx, o.dy});
    }
    CHECK(seen.size() == 8);
    CHECK(action_offset(Action::Up).dy == 1);
    CHECK(action_offset(Action::Right).dx == 1);
    CHECK_THROWS_AS(action_from_index(8), std::out_of_range);
}

TEST_CASE("Jain fairness") {
    const std::vector<long long> eq{2, 2, 2}, one{1, 0, 0, 0}, zero{0, 0}, empty;
    CHECK(jain_fairness(eq) == 1.0);
    CHECK(jain_fairness(one) == 0.25);
    CHECK(jain_fairness(zero) == 0.0);
    CHECK_THROWS_AS(jain_fairness(empty), std::domain_error);

    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> len(1, 40), cnt(0, 50);
    for (int i = 0; i < 1000; ++i) {
        std::vector<long long> c(static_cast<std::size_t>(len(rng)));
        long long total = 0;
        for (auto& x : c) total += x = cnt(rng);
        const double f = jain_fairness(c);
        CHECK(f <= 1.0 + 1e-15);
        if (total > 0) CHECK(f >= 1.0 / static_cast<double>(c.size()) - 1e-15);
    }
}

TEST_CASE("flight energy") {
    ScenarioConfig cfg;
    CHECK(flight_energy({3, 3}, {4, 3}, cfg) == doctest::Approx(110.0).epsilon(1e-14));
    CHECK(flight_energy({3, 3}, {3, 3}, cfg) == 0.0);
    CHECK(flight_energy({3, 3}, {4, 4}, cfg) == doctest::Approx(110.0 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(flight_energy({3, 3}, {4, 4}, cfg) == doctest::Approx(155.56).epsilon(1e-4));
}

TEST_CASE("step with nothing in coverage") {
    ScenarioConfig cfg;
    cfg.h_min = 1.0;
    WorldState w = spawn_world(cfg, 10);
    const StepOutcome out = step(w, Action::Up, cfg);
    CHECK(out.served_ids.empty());
    CHECK(out.reward == 0.0);
    CHECK(out.fairness == 0.0);
    for (const auto& gu : w.gus) CHECK(gu.buffer_bits == doctest::Approx(cfg.arrival_bits));
}

TEST_CASE("step serving one static GU under the UAV") {
    ScenarioConfig cfg;
    WorldState w = static_world(cfg);
    // Move away and back so the GU is under the UAV after the step.
    w.gus[0].pos = cell_center({w.uav.cell.col + 1, w.uav.cell.row}, cfg);
    const StepOutcome out = step(w, Action::Right, cfg);
    const double r = 2e6 * std::log2(1.0 + 6.25e-9 * 0.1 / 1e-18);
    REQUIRE(out.served_ids.size() == 1);
    CHECK(out.throughput_bits == doctest::Approx(r * 0.1).epsilon(1e-6));
    CHECK(out.throughput_bits == doctest::Approx(5.845e6).epsilon(1e-3));
    CHECK(out.fairness == 1.0);
    CHECK(out.reward == doctest::Approx(out.throughput_bits).epsilon(1e-15));
    CHECK(out.energy_spent == doctest::Approx(110.0));
    CHECK(w.gus[0].buffer_bits == 0.0);
    CHECK(w.gus[0].served_count == 1);
    CHECK(w.slot == 1);
}

TEST_CASE("step past the energy budget terminates without reward") {
    ScenarioConfig cfg;
    WorldState w = static_world(cfg);
    w.uav.energy_used = cfg.energy_budget;
    const StepOutcome out = step(w, Action::Up, cfg);
    CHECK(out.done);
    CHECK(out.done_reason == DoneReason::energy_exhausted);
    CHECK(out.reward == 0.0);
    CHECK_THROWS_AS(step(w, Action::Up, cfg), UsageError);
}

TEST_CASE("max_steps ends the episode") {
    ScenarioConfig cfg;
    cfg.max_steps_per_episode = 3;
    WorldState w = spawn_world(cfg, 5);
    CHECK_FALSE(step(w, Action::Up, cfg).done);
    CHECK_FALSE(step(w, Action::Up, cfg).done);
    const StepOutcome last = step(w, Action::Up, cfg);
    CHECK(last.done);
    CHECK(last.done_reason == DoneReason::max_steps);
}

TEST_CASE("episode ledgers under random actions") {
    ScenarioConfig cfg;
    cfg.grid_k = 8;
    cfg.h_min = 2e-7;
    cfg.arrival_bits = 3e5;
    cfg.max_steps_per_episode = 400;
    cfg.energy_budget = 30000;
    std::mt19937_64 pick(5);
    std::uniform_int_distribution<int> a(0, kNumActions - 1);
    for (int ep = 0; ep < 20; ++ep) {
        cfg.seed = 1000 + static_cast<std::uint64_t>(ep);
        WorldState w = spawn_world(cfg, 12);
        double energy = 0.0;
        while (!w.done) {
            const std::vector<GroundUser> before = w.gus;
            const Cell from = w.uav.cell;
            const StepOutcome out = step(w, action_from_index(a(pick)), cfg);
            energy += flight_energy(from, w.uav.cell, cfg);
            REQUIRE(in_grid(w.uav.cell, cfg.grid_k));
            REQUIRE(out.fairness >= 0.0);
            REQUIRE(out.fairness <= 1.0);
            if (out.reward > 0.0) {
                REQUIRE_FALSE(out.served_ids.empty());
                REQUIRE(w.uav.energy_used <= cfg.energy_budget);
            }
            std::vector<bool> served(before.size(), false);
            for (int id : out.served_ids) served[static_cast<std::size_t>(id)] = true;
            for (std::size_t i = 0; i < before.size(); ++i) {
                const double prev = before[i].buffer_bits;
                const double delta = w.gus[i].buffer_bits - prev;
                REQUIRE(w.gus[i].buffer_bits >= 0.0);
                if (served[i]) {
                    const double up = rate(w.samples[i].coeff_mag, cfg) * cfg.hover_tau_c;
                    REQUIRE(delta == doctest::Approx(cfg.arrival_bits - std::min(up, prev + cfg.arrival_bits)));
                } else {
                    REQUIRE(delta == doctest::Approx(cfg.arrival_bits));
                }
            }
        }
        CHECK(std::abs(w.uav.energy_used - energy) <= 1e-12 * energy);
    }
}

TEST_CASE("discounted return") {
    const std::vector<double> ones{1, 1, 1}, zeros{0, 0, 0, 0}, single{4.5};
    CHECK(discounted_return(ones, 0.5) == 1.75);
    CHECK(discounted_return(zeros, 0.9) == 0.0);
    CHECK(discounted_return(single, 0.9) == 4.5);
}
