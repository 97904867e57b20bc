#ifndef FINGAIT_KINEMATICS_HPP
#define FINGAIT_KINEMATICS_HPP

#include <array>
#include <cstddef>
#include <vector>

namespace fingait {

// One flapping gait. Amplitudes are half-ranges of the fin strokes in
// degrees; the offset is the pitch phase lead as a fraction of a cycle.
struct Gait {
    double stroke_amplitude = 0.0;    // deg
    double pitch_amplitude = 0.0;     // deg
    double flap_frequency = 1.0;      // Hz
    double stroke_pitch_offset = 0.0; // cycle fraction

    std::array<double, 4> to_array() const {
        return {stroke_amplitude, pitch_amplitude, flap_frequency, stroke_pitch_offset};
    }
    static Gait from_array(const std::array<double, 4>& a) {
        return {a[0], a[1], a[2], a[3]};
    }
};

constexpr std::size_t kGaitDims = 4;

using NormalizedGait = std::array<double, 4>;

// Servo capability used when turning a gait into commanded fin motion.
struct MotorLimits {
    double max_velocity = 400.0;      // deg/s
    double max_acceleration = 4000.0; // deg/s^2
};

// Box of admissible gaits plus the per-dimension step sizes that define the
// normalized coordinates all searches run in.  step_sizes are the "one unit"
// scales: normalize() divides each raw value by its step size.
struct KinematicSpace {
    Gait lower{0.0, 0.0, 0.75, -0.0625};
    Gait upper{55.0, 55.0, 2.0, 0.125};
    Gait step_sizes{10.0, 10.0, 0.25, 0.0625};

    void validate() const; // throws std::invalid_argument on a bad box

    bool contains(const Gait& g) const;

    NormalizedGait normalize(const Gait& g) const;
    Gait denormalize(const NormalizedGait& n) const;

    // Same steps, bounds widened so every gait and its sign-mirrored
    // counterpart both fit.  Used when reverse thrust is in play.
    KinematicSpace mirror_extended() const;
};

// Whether the two fin servos can physically realize the gait.  The envelope
// shrinks with flapping frequency; amplitudes enter by magnitude so mirrored
// gaits are judged like their positive counterparts.
bool is_attainable(const Gait& g);

struct TimeHistorySample {
    double stroke_angle = 0.0; // deg
    double pitch_angle = 0.0;  // deg
};

// Realized fin motion over one steady flapping cycle, evenly sampled.
struct TimeHistory {
    std::vector<TimeHistorySample> points;

    std::size_t samples_per_cycle() const { return points.size(); }
};

// Runs the commanded stroke/pitch waveforms (16 setpoints per cycle) through
// a rate- and acceleration-limited servo model and returns the second cycle,
// resampled to samples_per_cycle points.  The first cycle is discarded as
// start-up transient.  Realized angles never exceed the commanded amplitudes.
TimeHistory generate_time_history(const Gait& gait, const MotorLimits& motor,
                                  std::size_t samples_per_cycle = 50);

} // namespace fingait

#endif
