#ifndef FINGAIT_FORWARD_MODEL_HPP
#define FINGAIT_FORWARD_MODEL_HPP

#include "fingait/kinematics.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace fingait {

// Gait -> mean thrust (N).  Implementations are immutable after construction
// and safe to share across threads.
class ForwardModel {
public:
    virtual ~ForwardModel() = default;
    virtual double predict_mean_thrust(const Gait& gait) const = 0;
};

// ----------------------------------------------------------------------
// Recurrent thrust predictor: one LSTM layer plus a scalar projection,
// driven by the realized fin motion over a cycle.

enum LstmGate { kGateInput = 0, kGateForget = 1, kGateCell = 2, kGateOutput = 3 };

// Per-step feature vector: the four z-scored gait parameters followed by the
// z-scored stroke and pitch angles at that step.
constexpr std::size_t kLstmInputDim = 6;

struct LstmWeights {
    std::size_t input_dim = kLstmInputDim;
    std::size_t hidden_dim = 100;

    // Row-major [hidden_dim x (input_dim + hidden_dim)] per gate; each row
    // holds the feature kernel followed by the recurrent kernel so a step is
    // one dot product against [features | h].
    std::array<std::vector<double>, 4> gate_weights;
    std::array<std::vector<double>, 4> gate_bias; // [hidden_dim] each

    std::vector<double> projection; // [hidden_dim]
    double projection_bias = 0.0;

    std::vector<double> feature_mean; // [input_dim]
    std::vector<double> feature_std;  // [input_dim], all positive

    void validate() const; // throws std::invalid_argument on shape errors
};

// Runs the recurrence from zero initial hidden/cell state and returns the
// per-step thrust sequence (one value per history sample).
std::vector<double> lstm_forward(const LstmWeights& w, const Gait& gait,
                                 const TimeHistory& history);

double mean_thrust_from_history(const std::vector<double>& thrust_sequence);

// ----------------------------------------------------------------------
// Static baseline: fully connected net over the four gait parameters.

struct DnnWeights {
    std::size_t input_dim = 4;
    std::vector<std::size_t> hidden_dims = {100, 100, 100};

    std::vector<std::vector<double>> kernels; // [layer]: row-major [out x in]
    std::vector<std::vector<double>> biases;  // [layer]: [out]
    std::vector<double> projection;           // [last hidden]
    double projection_bias = 0.0;

    std::vector<double> feature_mean; // [input_dim]
    std::vector<double> feature_std;  // [input_dim], all positive

    void validate() const;
};

// ReLU hidden layers, linear output.
double dnn_forward(const DnnWeights& w, const Gait& gait);

// ----------------------------------------------------------------------
// Model wrappers.

class LstmModel : public ForwardModel {
public:
    LstmModel(LstmWeights weights, MotorLimits motor, std::size_t sequence_length = 50);

    double predict_mean_thrust(const Gait& gait) const override;
    std::vector<double> predict_thrust_sequence(const Gait& gait) const;

    const LstmWeights& weights() const { return weights_; }

private:
    LstmWeights weights_;
    MotorLimits motor_;
    std::size_t sequence_length_;
};

class DnnModel : public ForwardModel {
public:
    explicit DnnModel(DnnWeights weights);

    double predict_mean_thrust(const Gait& gait) const override;

    const DnnWeights& weights() const { return weights_; }

private:
    DnnWeights weights_;
};

// ----------------------------------------------------------------------
// Closed-form stand-in for a trained thrust model, used by the benchmarks
// and as a reproducible test target.  Version 1:
//
//   u = stroke/55, v = pitch/55
//   thrust(g) = 4.0 * (f/2)^2
//                   * (0.8 + 0.2*cos(2*pi*(|o| - 0.0625)/0.25))
//                   * (|u| + 0.015) * v
//
// Zero whenever pitch is zero.  Thrust magnitude grows with stroke
// amplitude and frequency and peaks near offset +-0.0625; its sign follows
// the pitch sign: reversing the pitch program reverses the blade's angle
// of attack and with it the thrust direction, while reversing the stroke
// direction alone merely mirrors the sweep and leaves body-axis thrust
// unchanged.  The 0.015 floor models the weak sculling thrust of a fin
// pitching in place, and keeps the pitch gradient nonzero even at zero
// stroke so pattern searches never sit on a flat spot.  Thrust is strictly
// monotone in pitch everywhere, so reverse-thrust gaits are always
// reachable from forward-thrust gaits by descent.  The stroke, frequency
// and offset factors are even and the pitch factor odd, making
// thrust(mirror(g)) == -thrust(g) hold bit for bit.  Spans about
// [-1.42, 1.42] N over the attainable box, with mid-amplitude gradients
// large enough that single-axis pattern moves pay for their kinematic
// penalty.
constexpr int kSyntheticSurrogateVersion = 1;

double synthetic_thrust(const Gait& gait);

class SyntheticSurrogate : public ForwardModel {
public:
    double predict_mean_thrust(const Gait& gait) const override { return synthetic_thrust(gait); }
};

// ----------------------------------------------------------------------
// Seeded random weights, used for inference cross-checks and timing runs.

LstmWeights make_random_lstm(std::uint64_t seed, std::size_t hidden_dim = 100);
DnnWeights make_random_dnn(std::uint64_t seed);

} // namespace fingait

#endif
