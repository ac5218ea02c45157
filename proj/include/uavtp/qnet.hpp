#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace uavtp {

/// Layer sizes of the value network. Defaults are the production
/// architecture; tests shrink the widths to keep checks cheap.
struct NetworkShape {
    int grid_k = 30;
    int in_planes = 4;
    int conv1_channels = 32;
    int conv2_channels = 32;
    int hidden = 256;
    int actions = 8;

    int cells() const { return grid_k * grid_k; }
    int pooled_side() const { return (grid_k + 1) / 2; }
    int flat_size() const { return conv2_channels * pooled_side() * pooled_side(); }

    friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

std::string describe(const NetworkShape& shape);

/// Weights of conv(3x3, SAME) -> ReLU -> conv(3x3, SAME) -> ReLU -> 2x2 average
/// pool -> dense -> ReLU -> dense.
///
/// Convolution weights are (out, in*9) with column in*9 + (dy+1)*3 + (dx+1)
/// for tap offset (dx, dy). The pooled map of channel c at pooled cell
/// q = px + S*py lands at flat index c + C2*q. Pool windows clipped by the
/// grid edge average over their in-grid cells only.
struct NetworkParams {
    NetworkShape shape;
    Eigen::MatrixXd conv1_w;
    Eigen::VectorXd conv1_b;
    Eigen::MatrixXd conv2_w;
    Eigen::VectorXd conv2_b;
    Eigen::MatrixXd fc1_w;
    Eigen::VectorXd fc1_b;
    Eigen::MatrixXd fc2_w;
    Eigen::VectorXd fc2_b;

    static NetworkParams zeros(const NetworkShape& shape);
    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every weight and bias.
    static NetworkParams init(const NetworkShape& shape, std::mt19937_64& rng);

    std::size_t parameter_count() const;

    /// Views over the eight tensors in layer order.
    std::vector<Eigen::Map<Eigen::VectorXd>> tensors();
    std::vector<Eigen::Map<const Eigen::VectorXd>> tensors() const;

    friend bool operator==(const NetworkParams& a, const NetworkParams& b);
};

/// One sample's input planes: in_planes x K^2, cell (x, y) at column x + K*y.
using NetInput = Eigen::MatrixXd;

/// Action values for one input. Throws std::domain_error on non-finite input.
Eigen::VectorXd forward(const NetworkParams& params, const NetInput& input);

struct TrainBatch {
    std::vector<NetInput> observations;
    std::vector<int> actions;
    std::vector<double> rewards;
    std::vector<NetInput> next_observations;
    std::vector<bool> terminals;

    std::size_t size() const { return actions.size(); }
};

struct TdResult {
    double loss = 0.0;
    NetworkParams gradients;
};

/// Mean squared TD error against r + gamma * max_a' Q_target(s', a'), with
/// the bootstrap dropped on terminal rows. Gradients flow through the
/// evaluation network only.
TdResult td_loss(const NetworkParams& eval, const NetworkParams& target, const TrainBatch& batch,
                 double gamma);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First and second moment estimates, one vector per tensor.
struct AdamState {
    AdamConfig config;
    std::vector<Eigen::VectorXd> m;
    std::vector<Eigen::VectorXd> v;
    long long steps = 0;
};

/// Bias-corrected Adam step over matching tensor lists.
void adam_step(std::vector<Eigen::Map<Eigen::VectorXd>> params,
               const std::vector<Eigen::Map<const Eigen::VectorXd>>& grads, AdamState& state);

void apply_update(NetworkParams& params, const NetworkParams& gradients, AdamState& state);

/// Target copy of the evaluation network.
inline NetworkParams sync_target(const NetworkParams& eval) { return eval; }

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeMismatch : public CheckpointError {
public:
    using CheckpointError::CheckpointError;
};

/// Binary layout, little-endian:
///   magic "UAVTPQN\0" (8 bytes), u32 version = 1,
///   six i32: grid_k, in_planes, conv1_channels, conv2_channels, hidden, actions,
///   then for each tensor in layer order (conv1_w, conv1_b, conv2_w, conv2_b,
///   fc1_w, fc1_b, fc2_w, fc2_b): u64 element count followed by f64 values in
///   column-major order.
void save_checkpoint(const std::string& path, const NetworkParams& params);

/// Throws ShapeMismatch if the stored shape differs from expected.
NetworkParams load_checkpoint(const std::string& path, const NetworkShape& expected);
NetworkParams load_checkpoint(const std::string& path);

}  // namespace uavtp
