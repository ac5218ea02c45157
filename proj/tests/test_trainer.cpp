#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "uavtp/observation.hpp"
#include "uavtp/trainer.hpp"

using namespace uavtp;

namespace {

ScenarioConfig small_scenario() {
    ScenarioConfig s;
    s.grid_k = 5;
    s.num_gus = 4;
    s.max_steps_per_episode = 15;
    s.h_min = 2e-7;
    s.arrival_bits = 2e5;
    s.seed = 42;
    return s;
}

TrainConfig small_train() {
    TrainConfig t;
    t.episodes = 3;
    t.offline_updates = 4;
    t.batch_size = 4;
    t.target_sync_interval = 7;
    t.conv_channels = 2;
    t.hidden_units = 6;
    t.online_capacity = 10;
    t.offline_capacity = 25;
    return t;
}

}  // namespace

TEST_CASE("select_action") {
    std::mt19937_64 rng(1);
    Eigen::VectorXd q(8);
    q << 0.1, 0.4, -1, 2.5, 0.3, 0.3, 2.4, 0;
    for (int i = 0; i < 100; ++i) CHECK(select_action(q, 1.0, rng) == Action::Right);
    std::array<int, 8> hist{};
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++hist[static_cast<std::size_t>(select_action(q, 0.0, rng))];
    CHECK(hist[3] == 0);
    for (int a = 0; a < 8; ++a) {
        if (a != 3) CHECK(std::abs(hist[static_cast<std::size_t>(a)] / double(n) - 1.0 / 7.0) <= 0.02);
    }
    CHECK(select_action(Eigen::VectorXd::Constant(8, 0.7), 1.0, rng) == Action::Up);
    CHECK_THROWS(select_action(Eigen::VectorXd::Zero(3), 1.0, rng));
}

TEST_CASE("one slot yields one experience") {
    ScenarioConfig s = small_scenario();
    s.max_steps_per_episode = 1;
    TrainConfig t = small_train();
    t.episodes = 1;
    Trainer trainer(s, t);
    const auto reports = trainer.train();
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].steps == 1);
    CHECK(trainer.offline_pool().size() == 1);
}

TEST_CASE("training is deterministic") {
    Trainer a(small_scenario(), small_train());
    Trainer b(small_scenario(), small_train());
    const auto ra = a.train();
    const auto rb = b.train();
    REQUIRE(ra.size() == 3);
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].total_reward == rb[i].total_reward);
        CHECK(ra[i].mean_td_loss == rb[i].mean_td_loss);
        CHECK(ra[i].steps == rb[i].steps);
        CHECK(ra[i].final_fairness == rb[i].final_fairness);
    }
    CHECK(a.eval_net() == b.eval_net());
}

TEST_CASE("frozen learner matches a plain environment rollout") {
    TrainConfig t = small_train();
    t.learning_rate = 0.0;
    const ScenarioConfig s = small_scenario();
    Trainer trainer(s, t);
    const auto reports = trainer.train();
    for (int e = 0; e < t.episodes; ++e) {
        const ScenarioConfig cfg = episode_scenario(s, t, e);
        WorldState w = spawn_world(cfg, cfg.num_gus);
        double total = 0.0;
        int steps = 0;
        while (!w.done) {
            const Observation o = build_observation(w, cfg, w.rng.trend);
            const Action a = select_action(forward(trainer.eval_net(), network_input(o)), cfg.agent_eta, w.rng.agent);
            total += step(w, a, cfg).reward;
            ++steps;
        }
        CHECK(reports[static_cast<std::size_t>(e)].total_reward == total);
        CHECK(reports[static_cast<std::size_t>(e)].steps == steps);
    }
}

TEST_CASE("episode counts and GU growth") {
    TrainConfig t = small_train();
    t.episodes = 0;
    CHECK(Trainer(small_scenario(), t).train().empty());

    ScenarioConfig base;
    base.num_gus = 50;
    TrainConfig growth;
    growth.gu_growth = true;
    CHECK(episode_scenario(base, growth, 0).num_gus == 50);
    CHECK(episode_scenario(base, growth, 9).num_gus == 59);
    CHECK(episode_scenario(base, TrainConfig{}, 9).num_gus == 50);
    CHECK(episode_scenario(base, growth, 1).seed != episode_scenario(base, growth, 2).seed);

    t.episodes = 4;
    t.gu_growth = true;
    int calls = 0;
    const auto reports = Trainer(small_scenario(), t).train([&](const EpisodeReport&) { ++calls; });
    CHECK(calls == 4);
    REQUIRE(reports.size() == 4);
    for (int e = 0; e < 4; ++e) CHECK(reports[static_cast<std::size_t>(e)].num_gus == small_scenario().num_gus + e);
}

TEST_CASE("evaluate") {
    ScenarioConfig s = small_scenario();
    s.max_steps_per_episode = 40;
    Trainer trainer(s, small_train());
    trainer.train();
    const EvalResult a = evaluate(trainer.eval_net(), s);
    const EvalResult b = evaluate(trainer.eval_net(), s);
    REQUIRE(a.trajectory.size() == b.trajectory.size());
    CHECK(a.report.steps == 40);
    std::vector<double> rewards;
    double energy = 0.0;
    for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
        CHECK(a.trajectory[i].cell == b.trajectory[i].cell);
        CHECK(a.trajectory[i].reward == b.trajectory[i].reward);
        CHECK(in_grid(a.trajectory[i].cell, s.grid_k));
        CHECK(a.trajectory[i].t == static_cast<int>(i) + 1);
        rewards.push_back(a.trajectory[i].reward);
        energy += a.trajectory[i].energy;
    }
    CHECK(a.report.total_reward == discounted_return(rewards, 1.0));
    CHECK(a.report.energy_used == doctest::Approx(energy).epsilon(1e-12));

    ScenarioConfig other = s;
    other.grid_k = 6;
    CHECK_THROWS_AS(evaluate(trainer.eval_net(), other), ShapeMismatch);
}

TEST_CASE("updates never see the future and targets move only at syncs") {
    const ScenarioConfig s = small_scenario();
    TrainConfig t = small_train();
    Trainer trainer(s, t);
    NetInput probe = NetInput::Zero(kInputPlanes, s.grid_k * s.grid_k);
    probe(0, 3) = 0.5;
    probe(3, 12) = 1.0;
    Eigen::VectorXd last_target = forward(trainer.target_net(), probe);
    int syncs = 0;
    bool ok = true;
    trainer.after_update = [&](const Trainer& tr, int episode) {
        for (const auto& e : tr.online_memory().contents()) ok &= e.episode == episode;
        for (const auto& e : tr.offline_memory().contents()) ok &= e.episode <= episode;
        const Eigen::VectorXd now = forward(tr.target_net(), probe);
        if (tr.updates() % t.target_sync_interval == 0) {
            ok &= tr.target_net() == tr.eval_net();
            ++syncs;
        } else {
            ok &= now == last_target;
        }
        last_target = now;
    };
    trainer.train();
    CHECK(ok);
    CHECK(syncs == trainer.updates() / t.target_sync_interval);
    CHECK(syncs > 0);
}

TEST_CASE("energy budget ends an episode with at most one overshooting move") {
    ScenarioConfig s = small_scenario();
    s.energy_budget = 400;
    s.max_steps_per_episode = 100;
    TrainConfig t = small_train();
    t.episodes = 2;
    Trainer trainer(s, t);
    for (const auto& r : trainer.train()) {
        CHECK(r.steps < 100);
        CHECK(r.energy_used > s.energy_budget);
        CHECK(r.energy_used <= s.energy_budget + flight_energy({0, 0}, {1, 1}, s) + 1e-9);
    }
    // Only the exhausting step is terminal.
    int terminals = 0;
    for (const auto& e : trainer.offline_pool()) terminals += e.terminal;
    CHECK(terminals == 2);
}

TEST_CASE("train config validation") {
    TrainConfig t;
    t.batch_size = 0;
    try {
        validate(t);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "batch_size");
    }
    KeyValues kv{{"episodes", "7"}, {"learning_rate", "0.5"}, {"gu_growth", "true"}, {"other", "x"}};
    TrainConfig u;
    apply_train_keys(u, kv);
    CHECK(u.episodes == 7);
    CHECK(u.learning_rate == 0.5);
    CHECK(u.gu_growth);
    CHECK(kv.size() == 1);
}
