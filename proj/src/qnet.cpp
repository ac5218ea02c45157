#include "uavtp/qnet.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace uavtp {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr int kTaps = 9;

RowMat im2col(const Eigen::Ref<const RowMat>& in, int k) {
    const int channels = static_cast<int>(in.rows());
    const int cells = k * k;
    RowMat cols = RowMat::Zero(channels * kTaps, cells);
    for (int c = 0; c < channels; ++c) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                double* dst = cols.row(c * kTaps + (dy + 1) * 3 + (dx + 1)).data();
                const double* src = in.row(c).data();
                const int y0 = std::max(0, -dy);
                const int y1 = std::min(k, k - dy);
                const int x0 = std::max(0, -dx);
                const int x1 = std::min(k, k - dx);
                for (int y = y0; y < y1; ++y) {
                    const double* s = src + (y + dy) * k + dx;
                    double* d = dst + y * k;
                    for (int x = x0; x < x1; ++x) d[x] = s[x];
                }
            }
        }
    }
    return cols;
}

RowMat col2im(const RowMat& cols, int channels, int k) {
    RowMat out = RowMat::Zero(channels, k * k);
    for (int c = 0; c < channels; ++c) {
        double* dst = out.row(c).data();
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const double* src = cols.row(c * kTaps + (dy + 1) * 3 + (dx + 1)).data();
                const int y0 = std::max(0, -dy);
                const int y1 = std::min(k, k - dy);
                const int x0 = std::max(0, -dx);
                const int x1 = std::min(k, k - dx);
                for (int y = y0; y < y1; ++y) {
                    double* d = dst + (y + dy) * k + dx;
                    const double* s = src + y * k;
                    for (int x = x0; x < x1; ++x) d[x] += s[x];
                }
            }
        }
    }
    return out;
}

// Pool cell of every grid cell, and the number of in-grid cells per window.
struct PoolMap {
    std::vector<int> target;
    std::vector<double> inv_count;
};

PoolMap make_pool_map(const NetworkShape& s) {
    const int k = s.grid_k;
    const int side = s.pooled_side();
    PoolMap pm;
    pm.target.resize(static_cast<std::size_t>(k * k));
    std::vector<int> count(static_cast<std::size_t>(side * side), 0);
    for (int y = 0; y < k; ++y) {
        for (int x = 0; x < k; ++x) {
            const int q = x / 2 + side * (y / 2);
            pm.target[static_cast<std::size_t>(x + k * y)] = q;
            ++count[static_cast<std::size_t>(q)];
        }
    }
    pm.inv_count.resize(count.size());
    for (std::size_t q = 0; q < count.size(); ++q) pm.inv_count[q] = 1.0 / count[q];
    return pm;
}

struct ConvCache {
    RowMat cols1;
    RowMat z1;
    RowMat cols2;
    RowMat z2;
};

// Runs both convolutions and the pool; returns the flattened pooled features.
Eigen::VectorXd conv_features(const NetworkParams& p, const PoolMap& pm, const NetInput& input,
                              ConvCache* cache) {
    const NetworkShape& s = p.shape;
    if (input.rows() != s.in_planes || input.cols() != s.cells()) {
        throw std::invalid_argument("forward: input is " + std::to_string(input.rows()) + "x" +
                                    std::to_string(input.cols()) + ", network expects " +
                                    std::to_string(s.in_planes) + "x" + std::to_string(s.cells()));
    }
    const RowMat in = input;
    RowMat cols1 = im2col(in, s.grid_k);
    RowMat z1 = p.conv1_w * cols1;
    z1.colwise() += p.conv1_b;
    RowMat cols2 = im2col(z1.cwiseMax(0.0), s.grid_k);
    RowMat z2 = p.conv2_w * cols2;
    z2.colwise() += p.conv2_b;

    const int side = s.pooled_side();
    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(s.conv2_channels, side * side);
    for (int cell = 0; cell < s.cells(); ++cell) {
        const int q = pm.target[static_cast<std::size_t>(cell)];
        for (int c = 0; c < s.conv2_channels; ++c) pooled(c, q) += std::max(0.0, z2(c, cell));
    }
    for (int q = 0; q < side * side; ++q) pooled.col(q) *= pm.inv_count[static_cast<std::size_t>(q)];

    if (cache != nullptr) {
        cache->cols1 = std::move(cols1);
        cache->z1 = std::move(z1);
        cache->cols2 = std::move(cols2);
        cache->z2 = std::move(z2);
    }
    return Eigen::Map<const Eigen::VectorXd>(pooled.data(), pooled.size());
}

void fill_uniform(Eigen::Ref<Eigen::MatrixXd> m, double bound, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-bound, bound);
    // Column-major fill keeps the draw order tied to the storage order.
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng);
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw CheckpointError("checkpoint truncated");
    return v;
}

constexpr char kMagic[8] = {'U', 'A', 'V', 'T', 'P', 'Q', 'N', '\0'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

std::string describe(const NetworkShape& s) {
    std::ostringstream os;
    os << "K=" << s.grid_k << " planes=" << s.in_planes << " conv=" << s.conv1_channels << "/"
       << s.conv2_channels << " hidden=" << s.hidden << " actions=" << s.actions;
    return os.str();
}

NetworkParams NetworkParams::zeros(const NetworkShape& s) {
    NetworkParams p;
    p.shape = s;
    p.conv1_w = Eigen::MatrixXd::Zero(s.conv1_channels, s.in_planes * kTaps);
    p.conv1_b = Eigen::VectorXd::Zero(s.conv1_channels);
    p.conv2_w = Eigen::MatrixXd::Zero(s.conv2_channels, s.conv1_channels * kTaps);
    p.conv2_b = Eigen::VectorXd::Zero(s.conv2_channels);
    p.fc1_w = Eigen::MatrixXd::Zero(s.hidden, s.flat_size());
    p.fc1_b = Eigen::VectorXd::Zero(s.hidden);
    p.fc2_w = Eigen::MatrixXd::Zero(s.actions, s.hidden);
    p.fc2_b = Eigen::VectorXd::Zero(s.actions);
    return p;
}

NetworkParams NetworkParams::init(const NetworkShape& s, std::mt19937_64& rng) {
    NetworkParams p = zeros(s);
    const auto layer = [&](Eigen::MatrixXd& w, Eigen::VectorXd& b) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
        fill_uniform(w, bound, rng);
        fill_uniform(b, bound, rng);
    };
    layer(p.conv1_w, p.conv1_b);
    layer(p.conv2_w, p.conv2_b);
    layer(p.fc1_w, p.fc1_b);
    layer(p.fc2_w, p.fc2_b);
    return p;
}

std::size_t NetworkParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors()) n += static_cast<std::size_t>(t.size());
    return n;
}

std::vector<Eigen::Map<Eigen::VectorXd>> NetworkParams::tensors() {
    std::vector<Eigen::Map<Eigen::VectorXd>> out;
    const auto add = [&](auto& m) { out.emplace_back(m.data(), m.size()); };
    add(conv1_w); add(conv1_b); add(conv2_w); add(conv2_b);
    add(fc1_w); add(fc1_b); add(fc2_w); add(fc2_b);
    return out;
}

std::vector<Eigen::Map<const Eigen::VectorXd>> NetworkParams::tensors() const {
    std::vector<Eigen::Map<const Eigen::VectorXd>> out;
    const auto add = [&](const auto& m) { out.emplace_back(m.data(), m.size()); };
    add(conv1_w); add(conv1_b); add(conv2_w); add(conv2_b);
    add(fc1_w); add(fc1_b); add(fc2_w); add(fc2_b);
    return out;
}

bool operator==(const NetworkParams& a, const NetworkParams& b) {
    if (!(a.shape == b.shape)) return false;
    const auto ta = a.tensors();
    const auto tb = b.tensors();
    for (std::size_t i = 0; i < ta.size(); ++i) {
        if (ta[i].size() != tb[i].size() || ta[i] != tb[i]) return false;
    }
    return true;
}

Eigen::VectorXd forward(const NetworkParams& p, const NetInput& input) {
    if (!input.allFinite()) throw std::domain_error("forward: non-finite input");
    const PoolMap pm = make_pool_map(p.shape);
    const Eigen::VectorXd flat = conv_features(p, pm, input, nullptr);
    const Eigen::VectorXd hidden = (p.fc1_w * flat + p.fc1_b).cwiseMax(0.0);
    return p.fc2_w * hidden + p.fc2_b;
}

TdResult td_loss(const NetworkParams& eval, const NetworkParams& target, const TrainBatch& batch,
                 double gamma) {
    const NetworkShape& s = eval.shape;
    const int n = static_cast<int>(batch.size());
    if (n == 0) throw std::invalid_argument("td_loss: empty batch");
    if (batch.observations.size() != batch.size() || batch.rewards.size() != batch.size() ||
        batch.next_observations.size() != batch.size() || batch.terminals.size() != batch.size()) {
        throw std::invalid_argument("td_loss: batch arrays disagree in length");
    }
    const PoolMap pm = make_pool_map(s);

    Eigen::VectorXd y(n);
    for (int b = 0; b < n; ++b) {
        y(b) = batch.rewards[static_cast<std::size_t>(b)];
        if (!batch.terminals[static_cast<std::size_t>(b)]) {
            y(b) += gamma * forward(target, batch.next_observations[static_cast<std::size_t>(b)]).maxCoeff();
        }
    }

    std::vector<ConvCache> caches(static_cast<std::size_t>(n));
    Eigen::MatrixXd flat(s.flat_size(), n);
    for (int b = 0; b < n; ++b) {
        flat.col(b) = conv_features(eval, pm, batch.observations[static_cast<std::size_t>(b)],
                                    &caches[static_cast<std::size_t>(b)]);
    }
    Eigen::MatrixXd z3 = eval.fc1_w * flat;
    z3.colwise() += eval.fc1_b;
    const Eigen::MatrixXd a3 = z3.cwiseMax(0.0);
    Eigen::MatrixXd q = eval.fc2_w * a3;
    q.colwise() += eval.fc2_b;

    TdResult res;
    res.gradients = NetworkParams::zeros(s);
    NetworkParams& g = res.gradients;

    Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(s.actions, n);
    double loss = 0.0;
    for (int b = 0; b < n; ++b) {
        const int a = batch.actions[static_cast<std::size_t>(b)];
        if (a < 0 || a >= s.actions) throw std::out_of_range("td_loss: action index out of range");
        const double err = q(a, b) - y(b);
        loss += err * err;
        dq(a, b) = 2.0 * err / n;
    }
    res.loss = loss / n;

    g.fc2_w = dq * a3.transpose();
    g.fc2_b = dq.rowwise().sum();
    const Eigen::MatrixXd dz3 = ((eval.fc2_w.transpose() * dq).array() * (z3.array() > 0.0).cast<double>()).matrix();
    g.fc1_w = dz3 * flat.transpose();
    g.fc1_b = dz3.rowwise().sum();
    const Eigen::MatrixXd dflat = eval.fc1_w.transpose() * dz3;

    for (int b = 0; b < n; ++b) {
        const ConvCache& c = caches[static_cast<std::size_t>(b)];
        RowMat dz2(s.conv2_channels, s.cells());
        for (int cell = 0; cell < s.cells(); ++cell) {
            const int qi = pm.target[static_cast<std::size_t>(cell)];
            const double scale = pm.inv_count[static_cast<std::size_t>(qi)];
            for (int ch = 0; ch < s.conv2_channels; ++ch) {
                dz2(ch, cell) = c.z2(ch, cell) > 0.0 ? dflat(ch + s.conv2_channels * qi, b) * scale : 0.0;
            }
        }
        g.conv2_w.noalias() += dz2 * c.cols2.transpose();
        g.conv2_b += dz2.rowwise().sum();
        const RowMat dcols2 = eval.conv2_w.transpose() * dz2;
        RowMat dz1 = col2im(dcols2, s.conv1_channels, s.grid_k);
        dz1.array() *= (c.z1.array() > 0.0).cast<double>();
        g.conv1_w.noalias() += dz1 * c.cols1.transpose();
        g.conv1_b += dz1.rowwise().sum();
    }
    return res;
}

void adam_step(std::vector<Eigen::Map<Eigen::VectorXd>> params,
               const std::vector<Eigen::Map<const Eigen::VectorXd>>& grads, AdamState& state) {
    if (params.size() != grads.size()) throw std::invalid_argument("adam_step: tensor count mismatch");
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.push_back(Eigen::VectorXd::Zero(p.size()));
            state.v.push_back(Eigen::VectorXd::Zero(p.size()));
        }
    }
    const AdamConfig& cfg = state.config;
    ++state.steps;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.steps));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.steps));
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].size() != grads[i].size() || state.m[i].size() != params[i].size()) {
            throw std::invalid_argument("adam_step: tensor shape mismatch");
        }
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i].cwiseAbs2();
        params[i].array() -= cfg.learning_rate * (state.m[i].array() / bias1) /
                             ((state.v[i].array() / bias2).sqrt() + cfg.epsilon);
    }
}

void apply_update(NetworkParams& params, const NetworkParams& gradients, AdamState& state) {
    if (!(params.shape == gradients.shape)) throw std::invalid_argument("apply_update: shape mismatch");
    adam_step(params.tensors(), gradients.tensors(), state);
}

void save_checkpoint(const std::string& path, const NetworkParams& params) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint '" + path + "'");
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    const NetworkShape& s = params.shape;
    for (std::int32_t v : {s.grid_k, s.in_planes, s.conv1_channels, s.conv2_channels, s.hidden, s.actions}) {
        write_pod(out, v);
    }
    for (const auto& t : params.tensors()) {
        write_pod(out, static_cast<std::uint64_t>(t.size()));
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.size() * sizeof(double)));
    }
    if (!out) throw CheckpointError("failed writing checkpoint '" + path + "'");
}

NetworkParams load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw CheckpointError("'" + path + "' is not a value-network checkpoint");
    }
    if (const auto version = read_pod<std::uint32_t>(in); version != kVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    NetworkShape s;
    s.grid_k = read_pod<std::int32_t>(in);
    s.in_planes = read_pod<std::int32_t>(in);
    s.conv1_channels = read_pod<std::int32_t>(in);
    s.conv2_channels = read_pod<std::int32_t>(in);
    s.hidden = read_pod<std::int32_t>(in);
    s.actions = read_pod<std::int32_t>(in);
    if (s.grid_k < 1 || s.in_planes < 1 || s.conv1_channels < 1 || s.conv2_channels < 1 ||
        s.hidden < 1 || s.actions < 1) {
        throw CheckpointError("checkpoint header holds an invalid shape");
    }
    NetworkParams p = NetworkParams::zeros(s);
    for (auto& t : p.tensors()) {
        const auto count = read_pod<std::uint64_t>(in);
        if (count != static_cast<std::uint64_t>(t.size())) {
            throw CheckpointError("checkpoint tensor size disagrees with its header");
        }
        in.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(count * sizeof(double)));
        if (!in) throw CheckpointError("checkpoint truncated");
    }
    return p;
}

NetworkParams load_checkpoint(const std::string& path, const NetworkShape& expected) {
    NetworkParams p = load_checkpoint(path);
    if (!(p.shape == expected)) {
        throw ShapeMismatch("checkpoint shape (" + describe(p.shape) + ") does not match (" +
                            describe(expected) + ")");
    }
    return p;
}

}  // namespace uavtp
