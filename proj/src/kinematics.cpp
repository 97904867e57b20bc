#include "fingait/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fingait {

void KinematicSpace::validate() const {
    const auto lo = lower.to_array();
    const auto hi = upper.to_array();
    const auto st = step_sizes.to_array();
    for (std::size_t i = 0; i < kGaitDims; ++i) {
        if (!(lo[i] <= hi[i]))
            throw std::invalid_argument("KinematicSpace: lower bound exceeds upper bound");
        if (!(st[i] > 0.0))
            throw std::invalid_argument("KinematicSpace: step sizes must be positive");
    }
}

bool KinematicSpace::contains(const Gait& g) const {
    const auto lo = lower.to_array();
    const auto hi = upper.to_array();
    const auto x = g.to_array();
    for (std::size_t i = 0; i < kGaitDims; ++i) {
        if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
}

NormalizedGait KinematicSpace::normalize(const Gait& g) const {
    const auto x = g.to_array();
    const auto st = step_sizes.to_array();
    NormalizedGait n;
    for (std::size_t i = 0; i < kGaitDims; ++i) n[i] = x[i] / st[i];
    return n;
}

Gait KinematicSpace::denormalize(const NormalizedGait& n) const {
    const auto st = step_sizes.to_array();
    std::array<double, 4> x;
    for (std::size_t i = 0; i < kGaitDims; ++i) x[i] = n[i] * st[i];
    return Gait::from_array(x);
}

KinematicSpace KinematicSpace::mirror_extended() const {
    KinematicSpace ext = *this;
    // Frequency has no mirrored sense; every other axis widens to the union
    // of the box and its negation.
    ext.lower.stroke_amplitude = std::min(lower.stroke_amplitude, -upper.stroke_amplitude);
    ext.upper.stroke_amplitude = std::max(upper.stroke_amplitude, -lower.stroke_amplitude);
    ext.lower.pitch_amplitude = std::min(lower.pitch_amplitude, -upper.pitch_amplitude);
    ext.upper.pitch_amplitude = std::max(upper.pitch_amplitude, -lower.pitch_amplitude);
    ext.lower.stroke_pitch_offset = std::min(lower.stroke_pitch_offset, -upper.stroke_pitch_offset);
    ext.upper.stroke_pitch_offset = std::max(upper.stroke_pitch_offset, -lower.stroke_pitch_offset);
    return ext;
}

bool is_attainable(const Gait& g) {
    const double ff = g.flap_frequency;
    return std::abs(g.stroke_amplitude) <= 97.0 - 30.0 * ff &&
           std::abs(g.pitch_amplitude) <= 75.0 - 26.0 * ff;
}

namespace {

constexpr int kSetpointsPerCycle = 16;
constexpr int kSubstepsPerSetpoint = 256;

// Commanded waveforms, sampled-and-held at 16 points per cycle.  phase is in
// cycles.  Pitch is a square wave shifted by the stroke/pitch offset.
double commanded_stroke(const Gait& g, double phase) {
    return g.stroke_amplitude * std::sin(2.0 * M_PI * phase);
}

double commanded_pitch(const Gait& g, double phase) {
    double u = phase - g.stroke_pitch_offset;
    u -= std::floor(u);
    return u < 0.5 ? g.pitch_amplitude : -g.pitch_amplitude;
}

struct MotorAxis {
    double x = 0.0;
    double v = 0.0;
};

// One Euler substep of a rate/acceleration limited servo chasing a held
// setpoint.  The deceleration law keeps |v| under the stopping-speed curve
// sqrt(2*a*dist); a software travel limit at the commanded amplitude keeps
// the realized angle from ever exceeding it.
void motor_substep(MotorAxis& m, double target, double limit, const MotorLimits& lim, double dt) {
    const double err = target - m.x;
    double v_des = std::sqrt(2.0 * lim.max_acceleration * std::abs(err));
    v_des = std::min(v_des, lim.max_velocity);
    v_des = err < 0.0 ? -v_des : v_des;

    const double dv_max = lim.max_acceleration * dt;
    m.v += std::clamp(v_des - m.v, -dv_max, dv_max);

    if (m.x + m.v * dt > limit) m.v = (limit - m.x) / dt;
    if (m.x + m.v * dt < -limit) m.v = (-limit - m.x) / dt;
    m.x += m.v * dt;
}

} // namespace

TimeHistory generate_time_history(const Gait& gait, const MotorLimits& motor,
                                  std::size_t samples_per_cycle) {
    if (!(gait.flap_frequency > 0.0))
        throw std::invalid_argument("generate_time_history: flap frequency must be positive");
    if (samples_per_cycle < static_cast<std::size_t>(kSetpointsPerCycle))
        throw std::invalid_argument("generate_time_history: need at least 16 samples per cycle");
    if (!(motor.max_velocity > 0.0) || !(motor.max_acceleration > 0.0))
        throw std::invalid_argument("generate_time_history: motor limits must be positive");

    const double period = 1.0 / gait.flap_frequency;
    const double dt = period / (kSetpointsPerCycle * kSubstepsPerSetpoint);
    const double stroke_limit = std::abs(gait.stroke_amplitude);
    const double pitch_limit = std::abs(gait.pitch_amplitude);

    MotorAxis stroke{commanded_stroke(gait, 0.0), 0.0};
    MotorAxis pitch{commanded_pitch(gait, 0.0), 0.0};

    // Two cycles on a fine grid; the first is start-up transient.
    const int fine_per_cycle = kSetpointsPerCycle * kSubstepsPerSetpoint;
    const int fine_total = 2 * fine_per_cycle;
    std::vector<double> stroke_fine(fine_total + 1), pitch_fine(fine_total + 1);
    stroke_fine[0] = stroke.x;
    pitch_fine[0] = pitch.x;
    for (int k = 0; k < fine_total; ++k) {
        const double phase = static_cast<double>(k / kSubstepsPerSetpoint) / kSetpointsPerCycle;
        motor_substep(stroke, commanded_stroke(gait, phase), stroke_limit, motor, dt);
        motor_substep(pitch, commanded_pitch(gait, phase), pitch_limit, motor, dt);
        stroke_fine[k + 1] = stroke.x;
        pitch_fine[k + 1] = pitch.x;
    }

    // Resample the steady cycle with linear interpolation on the fine grid.
    TimeHistory th;
    th.points.resize(samples_per_cycle);
    for (std::size_t j = 0; j < samples_per_cycle; ++j) {
        const double pos = fine_per_cycle +
                           static_cast<double>(j) * fine_per_cycle / static_cast<double>(samples_per_cycle);
        const int k0 = static_cast<int>(pos);
        const double frac = pos - k0;
        const int k1 = std::min(k0 + 1, fine_total);
        th.points[j].stroke_angle = stroke_fine[k0] + frac * (stroke_fine[k1] - stroke_fine[k0]);
        th.points[j].pitch_angle = pitch_fine[k0] + frac * (pitch_fine[k1] - pitch_fine[k0]);
    }
    return th;
}

} // namespace fingait
