#include "fingait/loss.hpp"

#include "fingait/forward_model.hpp"

#include <cmath>
#include <stdexcept>

namespace fingait {

void LossWeights::validate() const {
    if (w_thrust < 0.0 || w_kinematic < 0.0 || w_efficiency < 0.0)
        throw std::invalid_argument("LossWeights: weights must be nonnegative");
    if (w_thrust == 0.0 && w_kinematic == 0.0 && w_efficiency == 0.0)
        throw std::invalid_argument("LossWeights: at least one weight must be positive");
}

double thrust_loss(double target_thrust, double predicted_thrust) {
    return std::abs(target_thrust - predicted_thrust);
}

double kinematic_loss(const Gait& from, const Gait& to, const KinematicSpace& space) {
    const auto a = space.normalize(from);
    const auto b = space.normalize(to);
    double sum = 0.0;
    for (std::size_t i = 0; i < kGaitDims; ++i) {
        const double d = b[i] - a[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double efficiency_loss(double thrust, double velocity, double power) {
    if (!(power > 0.0))
        throw std::invalid_argument("efficiency_loss: power must be positive");
    return -(thrust * velocity / power);
}

LossBreakdown total_loss(double target_thrust, const Gait& current, const Gait& proposed,
                         const LossWeights& weights, const ForwardModel& model,
                         const KinematicSpace& space) {
    LossBreakdown b;
    b.thrust_loss = thrust_loss(target_thrust, model.predict_mean_thrust(proposed));
    b.kinematic_loss = kinematic_loss(current, proposed, space);
    b.efficiency_loss = 0.0;
    b.total = weights.w_thrust * b.thrust_loss + weights.w_kinematic * b.kinematic_loss +
              weights.w_efficiency * b.efficiency_loss;
    return b;
}

} // namespace fingait
