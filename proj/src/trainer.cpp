#include "uavtp/trainer.hpp"

#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "uavtp/channel.hpp"
#include "uavtp/observation.hpp"

namespace uavtp {

namespace {

enum : std::uint64_t { kEpisodeTag = 101, kLearnerTag = 102, kInitTag = 103 };

struct TrainField {
    const char* key;
    std::function<void(TrainConfig&, const std::string&)> set;
    std::function<std::string(const TrainConfig&)> get;
};

#define UAVTP_TRAIN_INT(name)                                                                    \
    TrainField{#name,                                                                            \
               [](TrainConfig& c, const std::string& v) { c.name = static_cast<int>(parse_int(#name, v)); }, \
               [](const TrainConfig& c) { return std::to_string(c.name); }}

const std::vector<TrainField>& train_fields() {
    static const std::vector<TrainField> table = {
        UAVTP_TRAIN_INT(episodes),
        UAVTP_TRAIN_INT(online_updates_per_slot),
        UAVTP_TRAIN_INT(online_update_interval),
        UAVTP_TRAIN_INT(offline_updates),
        UAVTP_TRAIN_INT(batch_size),
        UAVTP_TRAIN_INT(target_sync_interval),
        TrainField{"learning_rate",
                   [](TrainConfig& c, const std::string& v) { c.learning_rate = parse_double("learning_rate", v); },
                   [](const TrainConfig& c) { return format_double(c.learning_rate); }},
        UAVTP_TRAIN_INT(offline_capacity),
        UAVTP_TRAIN_INT(online_capacity),
        TrainField{"reward_scale",
                   [](TrainConfig& c, const std::string& v) { c.reward_scale = parse_double("reward_scale", v); },
                   [](const TrainConfig& c) { return format_double(c.reward_scale); }},
        TrainField{"gu_growth",
                   [](TrainConfig& c, const std::string& v) { c.gu_growth = parse_bool("gu_growth", v); },
                   [](const TrainConfig& c) { return std::string(c.gu_growth ? "true" : "false"); }},
        UAVTP_TRAIN_INT(conv_channels),
        UAVTP_TRAIN_INT(hidden_units),
    };
    return table;
}

#undef UAVTP_TRAIN_INT

void require(bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, std::string(key) + ": " + what);
}

}  // namespace

void validate(const TrainConfig& c) {
    require(c.episodes >= 0, "episodes", "must be non-negative");
    require(c.online_updates_per_slot >= 0, "online_updates_per_slot", "must be non-negative");
    require(c.online_update_interval > 0, "online_update_interval", "must be positive");
    require(c.offline_updates >= 0, "offline_updates", "must be non-negative");
    require(c.batch_size > 0, "batch_size", "must be positive");
    require(c.target_sync_interval > 0, "target_sync_interval", "must be positive");
    require(c.learning_rate >= 0, "learning_rate", "must be non-negative");
    require(c.offline_capacity > 0, "offline_capacity", "must be positive");
    require(c.online_capacity > 0, "online_capacity", "must be positive");
    require(c.reward_scale >= 0, "reward_scale", "must be non-negative (0 selects automatic scaling)");
    require(c.conv_channels > 0, "conv_channels", "must be positive");
    require(c.hidden_units > 0, "hidden_units", "must be positive");
}

void apply_train_keys(TrainConfig& cfg, KeyValues& kv) {
    for (const auto& f : train_fields()) {
        if (auto it = kv.find(f.key); it != kv.end()) {
            f.set(cfg, it->second);
            kv.erase(it);
        }
    }
}

void write_train_keys(std::ostream& out, const TrainConfig& cfg) {
    for (const auto& f : train_fields()) out << f.key << " = " << f.get(cfg) << '\n';
}

int argmax_action(const Eigen::VectorXd& q) {
    int best = 0;
    for (int i = 1; i < q.size(); ++i) {
        if (q(i) > q(best)) best = i;
    }
    return best;
}

Action select_action(const Eigen::VectorXd& q, double eta, std::mt19937_64& rng) {
    if (q.size() != kNumActions) throw std::invalid_argument("select_action: need 8 action values");
    const int best = argmax_action(q);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < eta) return action_from_index(best);
    std::uniform_int_distribution<int> other(0, kNumActions - 2);
    int pick = other(rng);
    if (pick >= best) ++pick;
    return action_from_index(pick);
}

NetworkShape network_shape(const ScenarioConfig& scen, const TrainConfig& train) {
    NetworkShape s;
    s.grid_k = scen.grid_k;
    s.in_planes = kInputPlanes;
    s.conv1_channels = train.conv_channels;
    s.conv2_channels = train.conv_channels;
    s.hidden = train.hidden_units;
    s.actions = kNumActions;
    return s;
}

ScenarioConfig episode_scenario(const ScenarioConfig& base, const TrainConfig& train, int episode) {
    ScenarioConfig cfg = base;
    cfg.seed = derive_seed(base.seed, kEpisodeTag, static_cast<std::uint64_t>(episode));
    if (train.gu_growth) cfg.num_gus = base.num_gus + episode;
    return cfg;
}

Trainer::Trainer(ScenarioConfig scenario, TrainConfig train)
    : scenario_(std::move(scenario)),
      train_(std::move(train)),
      offline_(MemoryKind::offline_large, static_cast<std::size_t>(train_.offline_capacity)),
      online_(MemoryKind::online_small, static_cast<std::size_t>(train_.online_capacity)),
      learner_rng_(derive_seed(scenario_.seed, kLearnerTag)) {
    validate(scenario_);
    validate(train_);
    std::mt19937_64 init_rng(derive_seed(scenario_.seed, kInitTag));
    eval_ = NetworkParams::init(network_shape(scenario_, train_), init_rng);
    target_ = sync_target(eval_);
    adam_.config.learning_rate = train_.learning_rate;
    reward_scale_ = train_.reward_scale > 0.0
                        ? train_.reward_scale
                        : 1.0 / (scenario_.num_gus * reference_rate(scenario_) * scenario_.hover_tau_c);
}

double Trainer::update_from(const ReplayMemory& memory, int episode) {
    const auto samples = memory.sample(train_.batch_size, learner_rng_);
    const TrainBatch batch = make_batch(samples, reward_scale_);
    TdResult res = td_loss(eval_, target_, batch, scenario_.discount_gamma);
    apply_update(eval_, res.gradients, adam_);
    ++updates_;
    if (updates_ % train_.target_sync_interval == 0) target_ = sync_target(eval_);
    if (after_update) after_update(*this, episode);
    return res.loss;
}

EpisodeReport Trainer::run_episode(int episode, std::vector<TrajectoryRecord>* trajectory) {
    const ScenarioConfig cfg = episode_scenario(scenario_, train_, episode);
    WorldState world = spawn_world(cfg, cfg.num_gus);
    if (prepare_world) prepare_world(world, cfg);

    EpisodeReport report;
    report.episode = episode;
    report.num_gus = cfg.num_gus;

    std::vector<Experience> current;
    current.reserve(static_cast<std::size_t>(cfg.max_steps_per_episode));
    double loss_sum = 0.0;
    long long loss_count = 0;

    Observation obs = build_observation(world, cfg, world.rng.trend);
    auto packed = std::make_shared<const PackedObservation>(pack(obs));

    while (!world.done) {
        const Eigen::VectorXd q = forward(eval_, network_input(obs));
        const Action action = select_action(q, cfg.agent_eta, world.rng.agent);
        const StepOutcome out = step(world, action, cfg);
        Observation next = build_observation(world, cfg, world.rng.trend);
        auto next_packed = std::make_shared<const PackedObservation>(pack(next));

        current.push_back(Experience{packed, static_cast<int>(action), out.reward, next_packed,
                                     out.done_reason == DoneReason::energy_exhausted, episode,
                                     sequence_++});
        online_.rebuild(current, learner_rng_);
        if (world.slot % train_.online_update_interval == 0) {
            for (int u = 0; u < train_.online_updates_per_slot; ++u) {
                loss_sum += update_from(online_, episode);
                ++loss_count;
            }
        }

        report.total_reward += out.reward;
        report.throughput_bits += out.throughput_bits;
        report.final_fairness = out.fairness;
        ++report.steps;
        if (trajectory != nullptr) {
            trajectory->push_back({world.slot, world.uav.cell, action, out.reward, out.fairness,
                                   out.throughput_bits, out.energy_spent, world.uav.energy_used,
                                   static_cast<int>(out.served_ids.size())});
        }
        obs = std::move(next);
        packed = std::move(next_packed);
    }
    report.energy_used = world.uav.energy_used;

    pool_.insert(pool_.end(), current.begin(), current.end());
    offline_.rebuild(pool_, learner_rng_);
    for (int u = 0; u < train_.offline_updates; ++u) {
        loss_sum += update_from(offline_, episode);
        ++loss_count;
    }
    report.mean_td_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    return report;
}

std::vector<EpisodeReport> Trainer::train(const std::function<void(const EpisodeReport&)>& on_episode) {
    std::vector<EpisodeReport> reports;
    reports.reserve(static_cast<std::size_t>(train_.episodes));
    for (int e = 0; e < train_.episodes; ++e) {
        reports.push_back(run_episode(e));
        if (on_episode) on_episode(reports.back());
    }
    return reports;
}

EvalResult evaluate(const NetworkParams& net, const ScenarioConfig& scenario) {
    validate(scenario);
    if (net.shape.grid_k != scenario.grid_k) {
        throw ShapeMismatch("network grid K=" + std::to_string(net.shape.grid_k) +
                            " but scenario K=" + std::to_string(scenario.grid_k));
    }
    EvalResult res;
    WorldState world = spawn_world(scenario, scenario.num_gus);
    res.report.num_gus = scenario.num_gus;
    Observation obs = build_observation(world, scenario, world.rng.trend);
    while (!world.done) {
        const Action action = select_action(forward(net, network_input(obs)), 1.0, world.rng.agent);
        const StepOutcome out = step(world, action, scenario);
        res.report.total_reward += out.reward;
        res.report.throughput_bits += out.throughput_bits;
        res.report.final_fairness = out.fairness;
        ++res.report.steps;
        res.trajectory.push_back({world.slot, world.uav.cell, action, out.reward, out.fairness,
                                  out.throughput_bits, out.energy_spent, world.uav.energy_used,
                                  static_cast<int>(out.served_ids.size())});
        obs = build_observation(world, scenario, world.rng.trend);
    }
    res.report.energy_used = world.uav.energy_used;
    return res;
}

}  // namespace uavtp
