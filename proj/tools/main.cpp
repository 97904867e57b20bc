#include "fingait/bench.hpp"
#include "fingait/weights_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <variant>

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string method;
    long seed = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "run configuration JSON file");
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
    cmd->add_option("--method", opts.method,
                    "restrict to one solver: mc, hjps or gps (overrides config)");
    cmd->add_option("--seed", opts.seed, "master seed (overrides config)");
}

fingait::RunConfig resolve_config(const CommonOpts& opts) {
    fingait::RunConfig cfg = opts.config_path.empty()
                                 ? fingait::default_run_config()
                                 : fingait::load_run_config(opts.config_path);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (!opts.method.empty()) cfg.methods = {fingait::search_method_from_string(opts.method)};
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    cfg.validate();
    return cfg;
}

int report_outcome(const fingait::BenchReport& report, const fingait::RunConfig& cfg,
                   const char* what) {
    for (const auto& c : report.cells) {
        std::printf("%-5s wt=%.2f wk=%.2f  requests=%ld  mean L_t=%.4f  mean L_k=%.4f  "
                    "mean L=%.4f  max t=%.3fs\n",
                    fingait::to_string(c.method), c.weights.w_thrust, c.weights.w_kinematic,
                    c.requests, c.mean_thrust_loss, c.mean_kinematic_loss, c.mean_total_loss,
                    c.max_time_s);
    }
    std::printf("%s results written to %s\n", what, cfg.out_dir.c_str());
    if (report.any_budget_violation()) {
        std::fprintf(stderr, "budget violation: a solver call exceeded %.3fs or ran out of "
                             "model evaluations\n",
                     cfg.timing_budget_s);
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"search-based gait selection benchmarks for a flapping-fin vehicle"};
    app.require_subcommand(1);

    CommonOpts synth_opts, sim_opts, timing_opts;
    auto* synth = app.add_subcommand(
        "synth", "sweep the solvers over synthetic thrust-request streams");
    add_common(synth, synth_opts);
    auto* simulate = app.add_subcommand(
        "simulate", "closed-loop position tracking with a per-cycle gait search");
    add_common(simulate, sim_opts);
    auto* timing = app.add_subcommand(
        "bench-timing", "measure per-call solver latency against the time budget");
    add_common(timing, timing_opts);

    std::string weights_path;
    auto* validate = app.add_subcommand("validate-weights",
                                        "check a model weight file and report its shape");
    validate->add_option("file", weights_path, "weight file to check")->required();

    std::string gen_kind = "lstm", gen_out;
    long gen_seed = 1;
    auto* gen = app.add_subcommand("gen-weights",
                                   "write a randomly initialized weight file for testing");
    gen->add_option("--kind", gen_kind, "lstm or dnn")
        ->check(CLI::IsMember({"lstm", "dnn"}));
    gen->add_option("--seed", gen_seed, "initialization seed");
    gen->add_option("--out", gen_out, "destination file")->required();

    std::string dump_path;
    auto* dump = app.add_subcommand("dump-config",
                                    "write the built-in default configuration as JSON");
    dump->add_option("file", dump_path, "destination file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            const auto cfg = resolve_config(synth_opts);
            return report_outcome(fingait::cmd_synth(cfg), cfg, "synth");
        }
        if (simulate->parsed()) {
            const auto cfg = resolve_config(sim_opts);
            return report_outcome(fingait::cmd_simulate(cfg), cfg, "simulate");
        }
        if (timing->parsed()) {
            const auto cfg = resolve_config(timing_opts);
            return report_outcome(fingait::cmd_bench_timing(cfg), cfg, "bench-timing");
        }
        if (validate->parsed()) {
            const auto loaded = fingait::load_weights(weights_path);
            if (std::holds_alternative<fingait::LstmWeights>(loaded)) {
                const auto& w = std::get<fingait::LstmWeights>(loaded);
                std::printf("ok: lstm, hidden_dim=%zu, input_dim=%zu\n", w.hidden_dim,
                            fingait::kLstmInputDim);
            } else {
                const auto& w = std::get<fingait::DnnWeights>(loaded);
                std::printf("ok: dnn, layers=%zu, input_dim=%zu\n", w.hidden_dims.size(),
                            w.input_dim);
            }
            return 0;
        }
        if (gen->parsed()) {
            const auto seed = static_cast<std::uint64_t>(gen_seed);
            if (gen_kind == "lstm")
                fingait::save_weights(fingait::make_random_lstm(seed), gen_out);
            else
                fingait::save_weights(fingait::make_random_dnn(seed), gen_out);
            std::printf("wrote %s weights to %s\n", gen_kind.c_str(), gen_out.c_str());
            return 0;
        }
        if (dump->parsed()) {
            fingait::save_run_config(fingait::default_run_config(), dump_path);
            std::printf("wrote default configuration to %s\n", dump_path.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
