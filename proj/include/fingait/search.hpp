#ifndef FINGAIT_SEARCH_HPP
#define FINGAIT_SEARCH_HPP

#include "fingait/forward_model.hpp"
#include "fingait/kinematics.hpp"
#include "fingait/loss.hpp"

#include <cstdint>
#include <string>

namespace fingait {

// One gait-selection problem: reach target_thrust starting from current_gait.
// current_gait must lie inside the space and be attainable.
struct InverseRequest {
    double target_thrust = 0.0; // N
    Gait current_gait;
    LossWeights weights;
};

enum class SearchMethod { kMonteCarlo, kHookeJeeves, kGps };

const char* to_string(SearchMethod m);
SearchMethod search_method_from_string(const std::string& name);

struct SearchConfig {
    int mc_samples = 50;          // accepted ball samples per Monte Carlo step
    double mc_radius_floor = 0.05; // smallest ball radius, normalized units
    double mesh_size = 3.0;       // initial poll step, normalized units
    double mesh_divider = 2.0;    // mesh shrink factor on a failed iteration
    double precision = 0.375;     // terminate once mesh drops below this
    long evaluation_budget = 2000; // forward-model evaluations per call
    std::uint64_t rng_seed = 1;   // Monte Carlo only; pattern searches ignore it

    void validate() const; // throws std::invalid_argument
};

struct SearchResult {
    Gait gait;
    LossBreakdown loss;
    long evaluations = 0;    // forward-model invocations
    double wall_time = 0.0;  // seconds
    bool budget_exhausted = false;
};

// Monte Carlo: uniform samples from a ball around the current gait in
// normalized space, radius |predicted - target| / 10 (floored); best of the
// samples and the incumbent wins, ties keep the incumbent.
SearchResult monte_carlo_step(const InverseRequest& req, const SearchConfig& cfg,
                              const ForwardModel& model, const KinematicSpace& space);

// Hooke-Jeeves pattern search: axis polls at the current mesh size, repeated
// pattern moves along the accepted displacement, mesh halves when a full
// poll fails.
SearchResult hjps_step(const InverseRequest& req, const SearchConfig& cfg,
                       const ForwardModel& model, const KinematicSpace& space);

// Hooke-Jeeves plus a composite search on poll failure: the per-axis
// directions of least loss increase are summed and retried, dropping the
// worst component at a time, which lets the search cut diagonally across
// valleys that defeat single-axis polling.
SearchResult gps_step(const InverseRequest& req, const SearchConfig& cfg,
                      const ForwardModel& model, const KinematicSpace& space);

SearchResult propose_gait(const InverseRequest& req, SearchMethod method,
                          const SearchConfig& cfg, const ForwardModel& model,
                          const KinematicSpace& space);

// Ball radius for the Monte Carlo step given the incumbent thrust gap.
double mc_search_radius(double thrust_gap, const SearchConfig& cfg);

// Deterministic seed derivation for sub-streams (per-request solver seeds,
// request-set seeds).  splitmix64 of base and salt.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

} // namespace fingait

#endif
