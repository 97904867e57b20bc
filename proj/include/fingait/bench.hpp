#ifndef FINGAIT_BENCH_HPP
#define FINGAIT_BENCH_HPP

#include "fingait/forward_model.hpp"
#include "fingait/kinematics.hpp"
#include "fingait/loss.hpp"
#include "fingait/search.hpp"
#include "fingait/simulation.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace fingait {

struct ModelConfig {
    std::string kind = "synthetic"; // synthetic | lstm | dnn
    std::string weights_path;
};

struct SynthProtocol {
    std::vector<double> delta_t_max = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    int requests_per_set = 100;
    double request_min = 0.2; // N
    double request_max = 1.2; // N
    // Each sweep cell starts from a mid-range swimming gait so that the first
    // request behaves like the rest of the chain rather than a cold start.
    Gait initial_gait{25.0, 25.0, 1.25, 0.0625};
};

struct ClosedLoopProtocol {
    int target_count = 100;
    int cycles_per_target = 15;
    double position_min = 0.0; // m
    double position_max = 10.0;
    PlantState plant;
    PidConfig pid;
    Gait initial_gait{0.0, 0.0, 1.0, 0.0};
};

struct TimingProtocol {
    int requests_per_method = 200;
    double delta_t_max = 0.5;
};

struct RunConfig {
    KinematicSpace space;
    MotorLimits motor;
    ModelConfig model;
    std::vector<SearchMethod> methods = {SearchMethod::kMonteCarlo, SearchMethod::kHookeJeeves,
                                         SearchMethod::kGps};
    SearchConfig search;
    std::vector<LossWeights> weight_settings = {{0.9, 0.1, 0.0}, {0.95, 0.05, 0.0},
                                                {1.0, 0.0, 0.0}};
    SynthProtocol synth;
    ClosedLoopProtocol closed_loop;
    TimingProtocol timing;
    std::size_t lstm_sequence_length = 50;
    double timing_budget_s = 0.5; // per propose_gait call
    std::uint64_t seed = 5;
    std::string out_dir = "out";

    void validate() const; // throws std::runtime_error on inconsistent setups
};

RunConfig default_run_config();

// Strict JSON load: every field optional with the defaults above, unknown
// fields anywhere are an error (std::runtime_error).
RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& cfg, const std::string& path);

// Instantiates the configured forward model (loads weight files if needed).
std::unique_ptr<ForwardModel> build_model(const RunConfig& cfg);

// ----------------------------------------------------------------------
// Synthetic request sweep: every (request set, method, weight setting) cell,
// requests chained so each solution seeds the next request's incumbent.

struct SynthRow {
    int dataset = 0;          // index into synth.delta_t_max
    double delta_t_max = 0.0;
    SearchMethod method = SearchMethod::kMonteCarlo;
    int weight_setting = 0;   // index into weight_settings
    int request_index = 0;
    double target_thrust = 0.0;
    double thrust_loss = 0.0;
    double kinematic_loss = 0.0;
    double efficiency_loss = 0.0;
    double total_loss = 0.0;
    long evaluations = 0;
    double time_s = 0.0;
    bool budget_exhausted = false;
};

struct SynthSweep {
    std::vector<SynthRow> rows;
};

SynthSweep run_synth_sweep(const RunConfig& cfg, const ForwardModel& model);

// ----------------------------------------------------------------------
// Aggregated reporting.

struct BenchCell {
    SearchMethod method = SearchMethod::kMonteCarlo;
    LossWeights weights;
    long requests = 0;
    double mean_thrust_loss = 0.0;
    double mean_kinematic_loss = 0.0;
    double mean_total_loss = 0.0;
    double mean_time_s = 0.0;
    double p99_time_s = 0.0;
    double max_time_s = 0.0;
    double mean_evaluations = 0.0;
    bool time_budget_exceeded = false;
    bool eval_budget_exhausted = false;
};

struct BenchReport {
    std::vector<BenchCell> cells;

    bool any_budget_violation() const;
};

// Subcommand entry points.  Each writes CSV reports (and a meta.json) under
// cfg.out_dir and returns the aggregate report.  Loss CSVs are byte-stable
// across reruns with the same seeds; wall-clock times go to separate files.
BenchReport cmd_synth(const RunConfig& cfg);
BenchReport cmd_simulate(const RunConfig& cfg);
BenchReport cmd_bench_timing(const RunConfig& cfg);

// ----------------------------------------------------------------------
// Small stats helpers shared by the reports and the test suites.

double mean_of(const std::vector<double>& values);
// q in [0, 1]; nearest-rank on a sorted copy (q = 0.99 -> 99th percentile).
double percentile_of(std::vector<double> values, double q);
// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

} // namespace fingait

#endif
