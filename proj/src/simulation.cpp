#include "fingait/simulation.hpp"

#include "fingait/loss.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fingait {

namespace {

constexpr double kPlantMaxSubstep = 5e-5; // s

} // namespace

void PlantState::validate() const {
    if (!(mass > 0.0)) throw std::invalid_argument("PlantState: mass must be positive");
    if (drag < 0.0) throw std::invalid_argument("PlantState: drag must be nonnegative");
}

PlantState plant_step(PlantState state, double thrust, double dt) {
    state.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("plant_step: dt must be positive");

    const int n = static_cast<int>(std::ceil(dt / kPlantMaxSubstep));
    const double h = dt / n;
    for (int k = 0; k < n; ++k) {
        const double accel =
            (thrust - state.drag * state.velocity * std::abs(state.velocity)) / state.mass;
        state.velocity += accel * h;
        state.position += state.velocity * h;
    }
    return state;
}

void PidController::reset() {
    integral_ = 0.0;
    prev_error_ = 0.0;
    primed_ = false;
}

double PidController::step(double setpoint, double measurement, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("PidController: dt must be positive");
    const double error = setpoint - measurement;

    integral_ += error * dt;
    integral_ = std::clamp(integral_, -cfg_.integral_limit, cfg_.integral_limit);

    const double derivative = primed_ ? (error - prev_error_) / dt : 0.0;
    prev_error_ = error;
    primed_ = true;

    const double out = cfg_.kp * error + cfg_.ki * integral_ + cfg_.kd * derivative;
    return std::clamp(out, -cfg_.output_limit, cfg_.output_limit);
}

Gait mirror_gait(const Gait& g) {
    return {-g.stroke_amplitude, -g.pitch_amplitude, g.flap_frequency, -g.stroke_pitch_offset};
}

double SymmetricModel::predict_mean_thrust(const Gait& gait) const {
    return (inner_.predict_mean_thrust(gait) - inner_.predict_mean_thrust(mirror_gait(gait))) / 2.0;
}

ThrustRequestSet generate_synthetic_requests(int count, double delta_t_max, std::uint64_t seed,
                                             double lo, double hi) {
    if (count < 1) throw std::invalid_argument("generate_synthetic_requests: count must be >= 1");
    if (!(lo < hi)) throw std::invalid_argument("generate_synthetic_requests: empty range");
    if (!(delta_t_max > 0.0) || delta_t_max > hi - lo)
        throw std::invalid_argument(
            "generate_synthetic_requests: delta_t_max must be in (0, hi - lo]");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> initial(lo, hi);
    std::uniform_real_distribution<double> step(-delta_t_max, delta_t_max);

    ThrustRequestSet set;
    set.delta_t_max = delta_t_max;
    set.seed = seed;
    set.provenance = ThrustRequestSet::Provenance::kSynthetic;
    set.requests.reserve(count);

    double value = initial(rng);
    set.requests.push_back(value);
    for (int i = 1; i < count; ++i) {
        double q = value + step(rng);
        while (q < lo || q > hi) {
            q = q < lo ? 2.0 * lo - q : 2.0 * hi - q;
        }
        value = q;
        set.requests.push_back(value);
    }
    return set;
}

ClosedLoopResult run_closed_loop(const std::vector<double>& target_positions,
                                 const ClosedLoopSetup& setup, const ForwardModel& model,
                                 const KinematicSpace& space) {
    if (setup.cycles_per_target < 1)
        throw std::invalid_argument("run_closed_loop: cycles_per_target must be >= 1");

    const KinematicSpace ext = space.mirror_extended();
    const SymmetricModel wrapped(model);
    if (!ext.contains(setup.initial_gait) || !is_attainable(setup.initial_gait))
        throw std::invalid_argument("run_closed_loop: initial gait is outside the search space");

    PlantState plant = setup.plant;
    plant.validate();
    PidController pid(setup.pid);

    ClosedLoopResult result;
    result.records.reserve(target_positions.size() * setup.cycles_per_target);

    Gait gait = setup.initial_gait;
    double dt_prev = 1.0 / gait.flap_frequency;
    double sim_time = 0.0;
    long cycle = 0;

    for (double target : target_positions) {
        pid.reset();
        for (int c = 0; c < setup.cycles_per_target; ++c, ++cycle) {
            const double request = pid.step(target, plant.position, dt_prev);

            // Transitions between forward and reverse thrust happen by
            // rotating the fin half a turn, which lands on the mirrored
            // gait; seed the search there when the requested sign opposes
            // the incumbent's prediction instead of making it walk the
            // whole landscape through zero.
            Gait incumbent = gait;
            if (request * wrapped.predict_mean_thrust(incumbent) < 0.0)
                incumbent = mirror_gait(incumbent);

            InverseRequest req{request, incumbent, setup.weights};
            SearchConfig cfg = setup.search;
            cfg.rng_seed = derive_seed(setup.search.rng_seed, static_cast<std::uint64_t>(cycle));
            const SearchResult res = propose_gait(req, setup.method, cfg, wrapped, ext);

            gait = res.gait;
            const double realized = wrapped.predict_mean_thrust(gait);
            const double dt = 1.0 / gait.flap_frequency;
            plant = plant_step(plant, realized, dt);
            sim_time += dt;
            dt_prev = dt;

            CycleRecord rec;
            rec.cycle = cycle;
            rec.target_position = target;
            rec.position = plant.position;
            rec.thrust_request = request;
            rec.realized_thrust = realized;
            rec.gait = gait;
            rec.thrust_loss = res.loss.thrust_loss;
            rec.kinematic_loss = res.loss.kinematic_loss;
            rec.total_loss = res.loss.total;
            rec.solver_ms = res.wall_time * 1000.0;
            rec.sim_time = sim_time;
            rec.evaluations = res.evaluations;
            rec.budget_exhausted = res.budget_exhausted;
            result.records.push_back(rec);
        }
    }
    return result;
}

} // namespace fingait
