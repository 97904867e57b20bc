#include "fingait/forward_model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace fingait {

namespace {

// Dot product with four independent accumulators; fixed summation order, so
// results are reproducible, and the compiler can keep the lanes in registers.
double dot4(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return (s0 + s1) + (s2 + s3) + tail;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_shape(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("weights: bad shape for " + what);
}

void check_std(const std::vector<double>& stds) {
    for (double s : stds)
        if (!(s > 0.0)) throw std::invalid_argument("weights: feature std must be positive");
}

} // namespace

void LstmWeights::validate() const {
    check_shape(input_dim == kLstmInputDim, "input_dim (expected 6)");
    check_shape(hidden_dim > 0, "hidden_dim");
    const std::size_t row = input_dim + hidden_dim;
    for (int g = 0; g < 4; ++g) {
        check_shape(gate_weights[g].size() == hidden_dim * row, "gate weight matrix");
        check_shape(gate_bias[g].size() == hidden_dim, "gate bias");
    }
    check_shape(projection.size() == hidden_dim, "projection");
    check_shape(feature_mean.size() == input_dim, "feature_mean");
    check_shape(feature_std.size() == input_dim, "feature_std");
    check_std(feature_std);
}

std::vector<double> lstm_forward(const LstmWeights& w, const Gait& gait,
                                 const TimeHistory& history) {
    w.validate();
    if (history.points.empty())
        throw std::invalid_argument("lstm_forward: empty time history");

    const std::size_t H = w.hidden_dim;
    const std::size_t row = w.input_dim + H;

    // [features | h]; the static gait features are z-scored once.
    std::vector<double> xh(row, 0.0);
    const auto g4 = gait.to_array();
    for (std::size_t i = 0; i < 4; ++i)
        xh[i] = (g4[i] - w.feature_mean[i]) / w.feature_std[i];

    std::vector<double> h(H, 0.0), c(H, 0.0), gates(4 * H);
    std::vector<double> out;
    out.reserve(history.points.size());

    for (const auto& pt : history.points) {
        xh[4] = (pt.stroke_angle - w.feature_mean[4]) / w.feature_std[4];
        xh[5] = (pt.pitch_angle - w.feature_mean[5]) / w.feature_std[5];
        for (std::size_t i = 0; i < H; ++i) xh[w.input_dim + i] = h[i];

        for (int g = 0; g < 4; ++g) {
            const double* mat = w.gate_weights[g].data();
            for (std::size_t r = 0; r < H; ++r)
                gates[g * H + r] = w.gate_bias[g][r] + dot4(xh.data(), mat + r * row, row);
        }
        for (std::size_t r = 0; r < H; ++r) {
            const double gi = sigmoid(gates[kGateInput * H + r]);
            const double gf = sigmoid(gates[kGateForget * H + r]);
            const double gc = std::tanh(gates[kGateCell * H + r]);
            const double go = sigmoid(gates[kGateOutput * H + r]);
            c[r] = gf * c[r] + gi * gc;
            h[r] = go * std::tanh(c[r]);
        }
        out.push_back(w.projection_bias + dot4(h.data(), w.projection.data(), H));
    }
    return out;
}

double mean_thrust_from_history(const std::vector<double>& thrust_sequence) {
    if (thrust_sequence.empty())
        throw std::invalid_argument("mean_thrust_from_history: empty sequence");
    double sum = 0.0;
    for (double t : thrust_sequence) sum += t;
    return sum / static_cast<double>(thrust_sequence.size());
}

void DnnWeights::validate() const {
    check_shape(input_dim == 4, "input_dim (expected 4)");
    check_shape(!hidden_dims.empty(), "hidden_dims");
    check_shape(kernels.size() == hidden_dims.size(), "kernel count");
    check_shape(biases.size() == hidden_dims.size(), "bias count");
    std::size_t prev = input_dim;
    for (std::size_t l = 0; l < hidden_dims.size(); ++l) {
        check_shape(hidden_dims[l] > 0, "hidden width");
        check_shape(kernels[l].size() == hidden_dims[l] * prev, "hidden kernel");
        check_shape(biases[l].size() == hidden_dims[l], "hidden bias");
        prev = hidden_dims[l];
    }
    check_shape(projection.size() == prev, "projection");
    check_shape(feature_mean.size() == input_dim, "feature_mean");
    check_shape(feature_std.size() == input_dim, "feature_std");
    check_std(feature_std);
}

double dnn_forward(const DnnWeights& w, const Gait& gait) {
    w.validate();
    const auto g4 = gait.to_array();
    std::vector<double> x(w.input_dim);
    for (std::size_t i = 0; i < w.input_dim; ++i)
        x[i] = (g4[i] - w.feature_mean[i]) / w.feature_std[i];

    std::vector<double> y;
    for (std::size_t l = 0; l < w.hidden_dims.size(); ++l) {
        const std::size_t n_out = w.hidden_dims[l];
        const std::size_t n_in = x.size();
        y.assign(n_out, 0.0);
        for (std::size_t r = 0; r < n_out; ++r) {
            const double a = w.biases[l][r] + dot4(x.data(), w.kernels[l].data() + r * n_in, n_in);
            y[r] = a > 0.0 ? a : 0.0;
        }
        x.swap(y);
    }
    return w.projection_bias + dot4(x.data(), w.projection.data(), x.size());
}

LstmModel::LstmModel(LstmWeights weights, MotorLimits motor, std::size_t sequence_length)
    : weights_(std::move(weights)), motor_(motor), sequence_length_(sequence_length) {
    weights_.validate();
    if (sequence_length_ < 16)
        throw std::invalid_argument("LstmModel: sequence length must be at least 16");
}

std::vector<double> LstmModel::predict_thrust_sequence(const Gait& gait) const {
    return lstm_forward(weights_, gait, generate_time_history(gait, motor_, sequence_length_));
}

double LstmModel::predict_mean_thrust(const Gait& gait) const {
    return mean_thrust_from_history(predict_thrust_sequence(gait));
}

DnnModel::DnnModel(DnnWeights weights) : weights_(std::move(weights)) { weights_.validate(); }

double DnnModel::predict_mean_thrust(const Gait& gait) const {
    return dnn_forward(weights_, gait);
}

double synthetic_thrust(const Gait& g) {
    const double u = g.stroke_amplitude / 55.0;
    const double v = g.pitch_amplitude / 55.0;
    const double psi = (g.flap_frequency / 2.0) * (g.flap_frequency / 2.0);
    const double phase =
        0.8 + 0.2 * std::cos(2.0 * M_PI * (std::abs(g.stroke_pitch_offset) - 0.0625) / 0.25);
    return 4.0 * psi * phase * (std::abs(u) + 0.015) * v;
}

LstmWeights make_random_lstm(std::uint64_t seed, std::size_t hidden_dim) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> kernel(-0.08, 0.08);
    std::uniform_real_distribution<double> proj(-0.1, 0.1);

    LstmWeights w;
    w.hidden_dim = hidden_dim;
    const std::size_t row = w.input_dim + hidden_dim;
    for (int g = 0; g < 4; ++g) {
        w.gate_weights[g].resize(hidden_dim * row);
        for (double& v : w.gate_weights[g]) v = kernel(rng);
        w.gate_bias[g].resize(hidden_dim);
        for (double& v : w.gate_bias[g]) v = kernel(rng);
    }
    w.projection.resize(hidden_dim);
    for (double& v : w.projection) v = proj(rng);
    w.projection_bias = proj(rng);
    // Rough scales of the gait box and fin angles.
    w.feature_mean = {27.0, 27.0, 1.4, 0.03, 0.0, 0.0};
    w.feature_std = {18.0, 18.0, 0.4, 0.07, 30.0, 25.0};
    return w;
}

DnnWeights make_random_dnn(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    DnnWeights w;
    std::size_t prev = w.input_dim;
    for (std::size_t width : w.hidden_dims) {
        const double r = 1.0 / std::sqrt(static_cast<double>(prev));
        std::uniform_real_distribution<double> dist(-r, r);
        std::vector<double> k(width * prev), b(width);
        for (double& v : k) v = dist(rng);
        for (double& v : b) v = dist(rng);
        w.kernels.push_back(std::move(k));
        w.biases.push_back(std::move(b));
        prev = width;
    }
    const double r = 1.0 / std::sqrt(static_cast<double>(prev));
    std::uniform_real_distribution<double> dist(-r, r);
    w.projection.resize(prev);
    for (double& v : w.projection) v = dist(rng);
    w.projection_bias = dist(rng);
    w.feature_mean = {27.0, 27.0, 1.4, 0.03};
    w.feature_std = {18.0, 18.0, 0.4, 0.07};
    return w;
}

} // namespace fingait
