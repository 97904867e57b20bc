#ifndef FINGAIT_LOSS_HPP
#define FINGAIT_LOSS_HPP

#include "fingait/kinematics.hpp"

namespace fingait {

class ForwardModel;

// Relative importance of thrust tracking vs. kinematic smoothness vs.
// efficiency.  Weights are nonnegative and at least one must be positive.
struct LossWeights {
    double w_thrust = 1.0;
    double w_kinematic = 0.0;
    double w_efficiency = 0.0;

    void validate() const; // throws std::invalid_argument
};

struct LossBreakdown {
    double thrust_loss = 0.0;
    double kinematic_loss = 0.0;
    double efficiency_loss = 0.0;
    double total = 0.0;
};

// |target - predicted|, in Newtons.
double thrust_loss(double target_thrust, double predicted_thrust);

// Euclidean distance between the two gaits in step-size-normalized
// coordinates; the penalty for changing gear abruptly.
double kinematic_loss(const Gait& from, const Gait& to, const KinematicSpace& space);

// Negated propulsive efficiency: -(thrust * velocity / power).  power must be
// positive.  Carried with zero weight in the shipped benchmarks; present for
// rigs that report drivetrain power.
double efficiency_loss(double thrust, double velocity, double power);

// Weighted objective used by all gait searches.  Runs the forward model once
// on the proposed gait.  The efficiency term is zero here: no velocity or
// power telemetry exists at gait-selection time.
LossBreakdown total_loss(double target_thrust, const Gait& current, const Gait& proposed,
                         const LossWeights& weights, const ForwardModel& model,
                         const KinematicSpace& space);

} // namespace fingait

#endif
