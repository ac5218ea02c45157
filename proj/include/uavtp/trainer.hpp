#pragma once

#include <functional>
#include <random>
#include <vector>

#include "uavtp/config.hpp"
#include "uavtp/environment.hpp"
#include "uavtp/qnet.hpp"
#include "uavtp/replay.hpp"

namespace uavtp {

/// Learning schedule. None of these knobs change the environment.
struct TrainConfig {
    int episodes = 1;
    int online_updates_per_slot = 1;
    int online_update_interval = 1;  // slots between online update rounds
    int offline_updates = 200;
    int batch_size = 32;
    int target_sync_interval = 500;  // in gradient updates
    double learning_rate = 1e-3;
    int offline_capacity = 50000;
    int online_capacity = 2000;
    // Multiplies stored rewards when forming TD targets; 0 selects
    // 1 / (num_gus * reference_rate * tau_c), i.e. one unit per slot at the
    // best-case sum throughput.
    double reward_scale = 0.0;
    bool gu_growth = false;
    int conv_channels = 32;
    int hidden_units = 256;
};

/// Throws ConfigError naming the first invalid field.
void validate(const TrainConfig& cfg);

/// Applies and removes every TrainConfig key present in kv.
void apply_train_keys(TrainConfig& cfg, KeyValues& kv);
void write_train_keys(std::ostream& out, const TrainConfig& cfg);

struct EpisodeReport {
    int episode = 0;
    double total_reward = 0.0;
    int steps = 0;
    double final_fairness = 0.0;
    double throughput_bits = 0.0;
    double energy_used = 0.0;
    double mean_td_loss = 0.0;
    int num_gus = 0;
};

struct TrajectoryRecord {
    int t = 0;
    Cell cell;
    Action action = Action::Up;
    double reward = 0.0;
    double fairness = 0.0;
    double throughput_bits = 0.0;
    double energy = 0.0;       // this slot's flight energy
    double energy_used = 0.0;  // cumulative
    int served = 0;
};

/// With probability eta the argmax (lowest index on ties), otherwise one of
/// the other actions uniformly.
Action select_action(const Eigen::VectorXd& qvalues, double eta, std::mt19937_64& rng);

/// Greedy action, lowest index on ties.
int argmax_action(const Eigen::VectorXd& qvalues);

NetworkShape network_shape(const ScenarioConfig& scen, const TrainConfig& train);

/// Scenario of one training episode: derived seed and (in growth mode) one
/// extra GU per elapsed episode.
ScenarioConfig episode_scenario(const ScenarioConfig& base, const TrainConfig& train, int episode);

/// Joint offline/online learner: an evaluation and a target network, a small
/// memory rebuilt from the running episode every slot and a large memory
/// rebuilt from all finished episodes.
class Trainer {
public:
    Trainer(ScenarioConfig scenario, TrainConfig train);

    EpisodeReport run_episode(int episode, std::vector<TrajectoryRecord>* trajectory = nullptr);

    /// Runs episodes [0, train.episodes); on_episode is called after each.
    std::vector<EpisodeReport> train(const std::function<void(const EpisodeReport&)>& on_episode = {});

    const NetworkParams& eval_net() const { return eval_; }
    const NetworkParams& target_net() const { return target_; }
    const ReplayMemory& offline_memory() const { return offline_; }
    const ReplayMemory& online_memory() const { return online_; }
    const std::vector<Experience>& offline_pool() const { return pool_; }
    long long updates() const { return updates_; }
    double reward_scale() const { return reward_scale_; }

    /// Called after every gradient update with the current episode index;
    /// lets tests audit memories and targets between updates.
    std::function<void(const Trainer&, int episode)> after_update;

    /// Applied to each freshly spawned episode world before the first
    /// observation, e.g. to pin GU positions.
    std::function<void(WorldState&, const ScenarioConfig&)> prepare_world;

private:
    double update_from(const ReplayMemory& memory, int episode);

    ScenarioConfig scenario_;
    TrainConfig train_;
    NetworkParams eval_;
    NetworkParams target_;
    AdamState adam_;
    ReplayMemory offline_;
    ReplayMemory online_;
    std::vector<Experience> pool_;
    std::mt19937_64 learner_rng_;
    long long updates_ = 0;
    long long sequence_ = 0;
    double reward_scale_ = 1.0;
};

struct EvalResult {
    EpisodeReport report;
    std::vector<TrajectoryRecord> trajectory;
};

/// Greedy rollout (eta = 1) with frozen parameters; no memories, no updates.
EvalResult evaluate(const NetworkParams& net, const ScenarioConfig& scenario);

}  // namespace uavtp
