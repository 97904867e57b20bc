#include "fingait/forward_model.hpp"

#include "fingait/kinematics.hpp"
#include "fingait/simulation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace fingait;

namespace {

// Plain-loop recurrence used as an independent reference for the fused
// implementation.  Same math, no batching or fused buffers.
std::vector<double> reference_lstm(const LstmWeights& w, const Gait& gait,
                                   const TimeHistory& history) {
    const std::size_t H = w.hidden_dim;
    const std::size_t in = w.input_dim;
    const std::size_t row = in + H;
    const auto g4 = gait.to_array();

    std::vector<double> h(H, 0.0), c(H, 0.0), out;
    for (const auto& pt : history.points) {
        std::vector<double> x(in);
        for (std::size_t i = 0; i < 4; ++i) x[i] = (g4[i] - w.feature_mean[i]) / w.feature_std[i];
        x[4] = (pt.stroke_angle - w.feature_mean[4]) / w.feature_std[4];
        x[5] = (pt.pitch_angle - w.feature_mean[5]) / w.feature_std[5];

        std::array<std::vector<double>, 4> act;
        for (int g = 0; g < 4; ++g) {
            act[g].assign(H, 0.0);
            for (std::size_t r = 0; r < H; ++r) {
                double s = w.gate_bias[g][r];
                for (std::size_t k = 0; k < in; ++k) s += w.gate_weights[g][r * row + k] * x[k];
                for (std::size_t k = 0; k < H; ++k)
                    s += w.gate_weights[g][r * row + in + k] * h[k];
                act[g][r] = s;
            }
        }
        for (std::size_t r = 0; r < H; ++r) {
            const double gi = 1.0 / (1.0 + std::exp(-act[kGateInput][r]));
            const double gf = 1.0 / (1.0 + std::exp(-act[kGateForget][r]));
            const double gc = std::tanh(act[kGateCell][r]);
            const double go = 1.0 / (1.0 + std::exp(-act[kGateOutput][r]));
            c[r] = gf * c[r] + gi * gc;
            h[r] = go * std::tanh(c[r]);
        }
        double y = w.projection_bias;
        for (std::size_t r = 0; r < H; ++r) y += w.projection[r] * h[r];
        out.push_back(y);
    }
    return out;
}

double reference_dnn(const DnnWeights& w, const Gait& gait) {
    const auto g4 = gait.to_array();
    std::vector<double> x(w.input_dim);
    for (std::size_t i = 0; i < w.input_dim; ++i)
        x[i] = (g4[i] - w.feature_mean[i]) / w.feature_std[i];

    for (std::size_t l = 0; l < w.hidden_dims.size(); ++l) {
        std::vector<double> y(w.hidden_dims[l], 0.0);
        for (std::size_t r = 0; r < w.hidden_dims[l]; ++r) {
            double s = w.biases[l][r];
            for (std::size_t k = 0; k < x.size(); ++k) s += w.kernels[l][r * x.size() + k] * x[k];
            y[r] = std::max(s, 0.0);
        }
        x = y;
    }
    double s = w.projection_bias;
    for (std::size_t k = 0; k < x.size(); ++k) s += w.projection[k] * x[k];
    return s;
}

Gait random_box_gait(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.0, 55.0);
    std::uniform_real_distribution<double> freq(0.75, 2.0);
    std::uniform_real_distribution<double> off(-0.0625, 0.125);
    return {amp(rng), amp(rng), freq(rng), off(rng)};
}

Gait random_extended_gait(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(-55.0, 55.0);
    std::uniform_real_distribution<double> freq(0.75, 2.0);
    std::uniform_real_distribution<double> off(-0.125, 0.125);
    return {amp(rng), amp(rng), freq(rng), off(rng)};
}

} // namespace

TEST_CASE("surrogate spot values") {
    // mid-box gait: all four factors take easy closed-form values
    CHECK(synthetic_thrust({27.5, 27.5, 1.0, 0.0625}) ==
          doctest::Approx(0.2575).epsilon(1e-12));
    // zero stroke leaves only the sculling floor
    CHECK(synthetic_thrust({0.0, 55.0, 2.0, 0.0625}) == doctest::Approx(0.06).epsilon(1e-12));
    // off-peak phase at offset 0 scales by 0.8
    CHECK(synthetic_thrust({27.5, 27.5, 1.0, 0.0}) ==
          doctest::Approx(0.2575 * 0.8).epsilon(1e-12));
}

TEST_CASE("surrogate is zero exactly when pitch is zero") {
    auto rng = std::mt19937_64(31);
    std::uniform_real_distribution<double> amp(-55.0, 55.0);
    std::uniform_real_distribution<double> freq(0.75, 2.0);
    std::uniform_real_distribution<double> off(-0.125, 0.125);
    for (int i = 0; i < 200; ++i) {
        CHECK(synthetic_thrust({amp(rng), 0.0, freq(rng), off(rng)}) == 0.0);
    }
}

TEST_CASE("surrogate thrust flips sign exactly under gait mirroring") {
    auto rng = std::mt19937_64(32);
    for (int i = 0; i < 1000; ++i) {
        const Gait g = random_extended_gait(rng);
        CHECK(synthetic_thrust(mirror_gait(g)) == -synthetic_thrust(g));
    }
}

TEST_CASE("surrogate is strictly monotone in pitch") {
    auto rng = std::mt19937_64(33);
    std::uniform_real_distribution<double> amp(-55.0, 55.0);
    std::uniform_real_distribution<double> freq(0.75, 2.0);
    std::uniform_real_distribution<double> off(-0.125, 0.125);
    std::uniform_real_distribution<double> pitch(-55.0, 55.0);
    for (int i = 0; i < 1000; ++i) {
        const double s = amp(rng), f = freq(rng), o = off(rng);
        double p1 = pitch(rng), p2 = pitch(rng);
        if (p1 == p2) continue;
        if (p1 > p2) std::swap(p1, p2);
        CHECK(synthetic_thrust({s, p1, f, o}) < synthetic_thrust({s, p2, f, o}));
    }
}

TEST_CASE("surrogate magnitude grows with stroke and frequency") {
    auto rng = std::mt19937_64(34);
    std::uniform_real_distribution<double> amp(0.0, 55.0);
    std::uniform_real_distribution<double> freq(0.75, 2.0);
    for (int i = 0; i < 500; ++i) {
        const double p = 10.0 + amp(rng) * 0.8;
        const double f = freq(rng);
        double s1 = amp(rng), s2 = amp(rng);
        if (s1 > s2) std::swap(s1, s2);
        if (s1 < s2)
            CHECK(synthetic_thrust({s1, p, f, 0.0625}) < synthetic_thrust({s2, p, f, 0.0625}));

        const double s = amp(rng);
        double f1 = freq(rng), f2 = freq(rng);
        if (f1 > f2) std::swap(f1, f2);
        if (f1 < f2)
            CHECK(std::abs(synthetic_thrust({s, p, f1, 0.0625})) <
                  std::abs(synthetic_thrust({s, p, f2, 0.0625})));
    }
}

TEST_CASE("surrogate offset response peaks at the quarter-cycle lead") {
    const double peak = synthetic_thrust({40.0, 30.0, 1.25, 0.0625});
    for (double o : {-0.125, -0.03, 0.0, 0.03, 0.1, 0.125}) {
        CHECK(synthetic_thrust({40.0, 30.0, 1.25, o}) <= peak);
    }
    // symmetric in the offset sign
    for (double o : {0.01, 0.05, 0.09, 0.125}) {
        CHECK(synthetic_thrust({40.0, 30.0, 1.25, o}) == synthetic_thrust({40.0, 30.0, 1.25, -o}));
    }
    CHECK(synthetic_thrust({40.0, 30.0, 1.25, -0.0625}) == peak);
}

TEST_CASE("surrogate peak output over the attainable box") {
    // grid scan pins the calibration: peak thrust comfortably above the
    // request range, located at the high-frequency attainability corner
    double best = -1.0;
    Gait arg;
    for (double s = 0.0; s <= 55.0; s += 1.0) {
        for (double p = 0.0; p <= 55.0; p += 1.0) {
            for (int k = 0; k <= 80; ++k) {
                const Gait g{s, p, 0.75 + k / 64.0, 0.0625};
                if (g.flap_frequency > 2.0 || !is_attainable(g)) continue;
                const double t = synthetic_thrust(g);
                if (t > best) {
                    best = t;
                    arg = g;
                }
            }
        }
    }
    CHECK(best == doctest::Approx(1.4144876033057852).epsilon(1e-9));
    CHECK(arg.stroke_amplitude == 52.0);
    CHECK(arg.pitch_amplitude == 36.0);
    CHECK(arg.flap_frequency == 1.5);
    CHECK(best > 1.2);
}

TEST_CASE("lstm inference matches a plain-loop reference") {
    for (int i = 0; i < 100; ++i) {
        auto rng = std::mt19937_64(1000 + i);
        const std::size_t hidden = 8 + (i % 5) * 4;
        const LstmWeights w = make_random_lstm(1000 + i, hidden);
        const Gait g = random_box_gait(rng);
        const TimeHistory th = generate_time_history(g, MotorLimits{}, 20 + (i % 3) * 15);

        const std::vector<double> got = lstm_forward(w, g, th);
        const std::vector<double> want = reference_lstm(w, g, th);
        REQUIRE(got.size() == want.size());
        for (std::size_t k = 0; k < got.size(); ++k)
            CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-9));
    }
}

TEST_CASE("dnn inference matches a plain-loop reference") {
    for (int i = 0; i < 100; ++i) {
        auto rng = std::mt19937_64(2000 + i);
        const DnnWeights w = make_random_dnn(2000 + i);
        const Gait g = random_box_gait(rng);
        CHECK(dnn_forward(w, g) == doctest::Approx(reference_dnn(w, g)).epsilon(1e-9));
    }
}

TEST_CASE("lstm model averages its thrust sequence") {
    const LstmWeights w = make_random_lstm(7, 16);
    const LstmModel model(w, MotorLimits{}, 32);
    const Gait g{30.0, 25.0, 1.25, 0.0625};

    const std::vector<double> seq = model.predict_thrust_sequence(g);
    CHECK(seq.size() == 32);
    CHECK(model.predict_mean_thrust(g) == mean_thrust_from_history(seq));
}

TEST_CASE("mean of a thrust sequence") {
    CHECK(mean_thrust_from_history({1.0, 2.0, 3.0}) == 2.0);
    CHECK(mean_thrust_from_history({-0.5}) == -0.5);
    CHECK_THROWS_AS(mean_thrust_from_history({}), std::invalid_argument);
}

TEST_CASE("lstm rejects malformed weights and inputs") {
    LstmWeights w = make_random_lstm(9, 8);
    const Gait g{30.0, 25.0, 1.25, 0.0625};
    const TimeHistory th = generate_time_history(g, MotorLimits{}, 20);

    CHECK_THROWS_AS(lstm_forward(w, g, TimeHistory{}), std::invalid_argument);

    LstmWeights bad = w;
    bad.gate_weights[kGateForget].pop_back();
    CHECK_THROWS_AS(lstm_forward(bad, g, th), std::invalid_argument);

    bad = w;
    bad.gate_bias[kGateOutput].push_back(0.0);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = w;
    bad.projection.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = w;
    bad.feature_std[2] = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = w;
    bad.input_dim = 5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    CHECK_THROWS_AS(LstmModel(w, MotorLimits{}, 8), std::invalid_argument);
}

TEST_CASE("dnn rejects malformed weights") {
    DnnWeights w = make_random_dnn(10);
    CHECK_NOTHROW(w.validate());

    DnnWeights bad = w;
    bad.kernels[1].pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = w;
    bad.biases.pop_back();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = w;
    bad.hidden_dims.clear();
    bad.kernels.clear();
    bad.biases.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = w;
    bad.feature_std[0] = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("random weight construction is seed-deterministic") {
    const LstmWeights a = make_random_lstm(5, 12);
    const LstmWeights b = make_random_lstm(5, 12);
    const LstmWeights c = make_random_lstm(6, 12);
    CHECK(a.gate_weights[0] == b.gate_weights[0]);
    CHECK(a.projection == b.projection);
    CHECK(a.gate_weights[0] != c.gate_weights[0]);

    const DnnWeights d = make_random_dnn(5);
    const DnnWeights e = make_random_dnn(5);
    const DnnWeights f = make_random_dnn(6);
    CHECK(d.kernels[0] == e.kernels[0]);
    CHECK(d.kernels[0] != f.kernels[0]);
}
