#include "fingait/bench.hpp"

#include "fingait/weights_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include <sys/utsname.h>

using nlohmann::json;

namespace fingait {

namespace {

void fail(const std::string& msg) { throw std::runtime_error("run config: " + msg); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    if (!obj.is_object()) fail(where + " must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) fail("unknown field '" + it.key() + "' in " + where);
    }
}

template <typename T>
void get_to(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) obj.at(key).get_to(out);
}

Gait parse_gait(const json& obj, const std::string& where) {
    reject_unknown(obj, {"stroke_amplitude", "pitch_amplitude", "flap_frequency",
                         "stroke_pitch_offset"},
                   where);
    Gait g;
    get_to(obj, "stroke_amplitude", g.stroke_amplitude);
    get_to(obj, "pitch_amplitude", g.pitch_amplitude);
    get_to(obj, "flap_frequency", g.flap_frequency);
    get_to(obj, "stroke_pitch_offset", g.stroke_pitch_offset);
    return g;
}

void parse_gait_field(const json& obj, const char* key, Gait& out, const std::string& where) {
    if (obj.contains(key)) out = parse_gait(obj.at(key), where + "." + key);
}

LossWeights parse_weights(const json& obj, const std::string& where) {
    reject_unknown(obj, {"w_thrust", "w_kinematic", "w_efficiency"}, where);
    LossWeights w{0.0, 0.0, 0.0};
    get_to(obj, "w_thrust", w.w_thrust);
    get_to(obj, "w_kinematic", w.w_kinematic);
    get_to(obj, "w_efficiency", w.w_efficiency);
    return w;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string weights_tag(const LossWeights& w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "wt%g_wk%g", w.w_thrust, w.w_kinematic);
    std::string tag(buf);
    std::replace(tag.begin(), tag.end(), '.', 'p');
    return tag;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

void write_meta(const RunConfig& cfg, const std::string& command) {
    utsname uts{};
    uname(&uts);
    json meta{{"command", command},
              {"host", std::string(uts.nodename)},
              {"system", std::string(uts.sysname) + " " + uts.release + " " + uts.machine},
              {"timestamp_utc", []() {
                   char buf[32];
                   const std::time_t now = std::time(nullptr);
                   std::tm tm{};
                   gmtime_r(&now, &tm);
                   std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
                   return std::string(buf);
               }()},
              {"seed", cfg.seed},
              {"model", cfg.model.kind},
              {"timing_budget_s", cfg.timing_budget_s}};
    open_out(std::filesystem::path(cfg.out_dir) / "meta.json") << meta.dump(2) << '\n';
}

struct CellTimes {
    std::vector<double> times;
    std::vector<double> evals;
    bool eval_budget_exhausted = false;
};

BenchCell make_cell(SearchMethod method, const LossWeights& w,
                    const std::vector<double>& thrust_losses,
                    const std::vector<double>& kinematic_losses,
                    const std::vector<double>& total_losses, const CellTimes& t,
                    double timing_budget_s) {
    BenchCell cell;
    cell.method = method;
    cell.weights = w;
    cell.requests = static_cast<long>(total_losses.size());
    cell.mean_thrust_loss = mean_of(thrust_losses);
    cell.mean_kinematic_loss = mean_of(kinematic_losses);
    cell.mean_total_loss = mean_of(total_losses);
    cell.mean_time_s = mean_of(t.times);
    cell.p99_time_s = percentile_of(t.times, 0.99);
    cell.max_time_s = t.times.empty() ? 0.0 : *std::max_element(t.times.begin(), t.times.end());
    cell.mean_evaluations = mean_of(t.evals);
    cell.time_budget_exceeded = cell.max_time_s > timing_budget_s;
    cell.eval_budget_exhausted = t.eval_budget_exhausted;
    return cell;
}

void write_cell_summary(const std::filesystem::path& path, const std::vector<BenchCell>& cells) {
    auto out = open_out(path);
    out << "method,w_thrust,w_kinematic,w_efficiency,requests,mean_thrust_loss,"
           "mean_kinematic_loss,mean_total_loss,mean_evaluations\n";
    for (const auto& c : cells) {
        out << to_string(c.method) << ',' << fmt_double(c.weights.w_thrust) << ','
            << fmt_double(c.weights.w_kinematic) << ',' << fmt_double(c.weights.w_efficiency)
            << ',' << c.requests << ',' << fmt_double(c.mean_thrust_loss) << ','
            << fmt_double(c.mean_kinematic_loss) << ',' << fmt_double(c.mean_total_loss) << ','
            << fmt_double(c.mean_evaluations) << '\n';
    }
}

void write_timing_summary(const std::filesystem::path& path, const std::vector<BenchCell>& cells) {
    auto out = open_out(path);
    out << "method,w_thrust,w_kinematic,calls,mean_time_s,p99_time_s,max_time_s,"
           "time_budget_exceeded,eval_budget_exhausted\n";
    for (const auto& c : cells) {
        out << to_string(c.method) << ',' << fmt_double(c.weights.w_thrust) << ','
            << fmt_double(c.weights.w_kinematic) << ',' << c.requests << ','
            << fmt_double(c.mean_time_s) << ',' << fmt_double(c.p99_time_s) << ','
            << fmt_double(c.max_time_s) << ',' << (c.time_budget_exceeded ? 1 : 0) << ','
            << (c.eval_budget_exhausted ? 1 : 0) << '\n';
    }
}

} // namespace

void RunConfig::validate() const {
    space.validate();
    search.validate();
    if (methods.empty()) fail("methods must not be empty");
    if (weight_settings.empty()) fail("weight_settings must not be empty");
    for (const auto& w : weight_settings) w.validate();
    if (model.kind != "synthetic" && model.kind != "lstm" && model.kind != "dnn")
        fail("model.kind must be synthetic, lstm or dnn");
    if (model.kind != "synthetic" && model.weights_path.empty())
        fail("model.weights_path is required for kind '" + model.kind + "'");
    if (synth.requests_per_set < 1) fail("synth.requests_per_set must be >= 1");
    if (!(synth.request_min < synth.request_max)) fail("synth request range is empty");
    if (synth.delta_t_max.empty()) fail("synth.delta_t_max must not be empty");
    for (double d : synth.delta_t_max)
        if (!(d > 0.0) || d > synth.request_max - synth.request_min)
            fail("synth.delta_t_max entries must lie in (0, request range]");
    if (!space.contains(synth.initial_gait) || !is_attainable(synth.initial_gait))
        fail("synth.initial_gait is outside the kinematic space");
    if (closed_loop.target_count < 1) fail("closed_loop.target_count must be >= 1");
    if (closed_loop.cycles_per_target < 1) fail("closed_loop.cycles_per_target must be >= 1");
    if (!(closed_loop.position_min <= closed_loop.position_max))
        fail("closed_loop position range is empty");
    closed_loop.plant.validate();
    if (timing.requests_per_method < 1) fail("timing.requests_per_method must be >= 1");
    if (!(timing.delta_t_max > 0.0)) fail("timing.delta_t_max must be positive");
    if (lstm_sequence_length < 16) fail("lstm_sequence_length must be >= 16");
    if (!(timing_budget_s > 0.0)) fail("timing_budget_s must be positive");
    if (out_dir.empty()) fail("out_dir must not be empty");
}

RunConfig default_run_config() { return RunConfig{}; }

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    json root;
    try {
        in >> root;
    } catch (const json::parse_error& e) {
        fail(std::string("parse error: ") + e.what());
    }

    reject_unknown(root,
                   {"space", "motor", "model", "methods", "search", "weight_settings", "synth",
                    "closed_loop", "timing", "lstm_sequence_length", "timing_budget_s", "seed",
                    "out_dir"},
                   "top level");

    RunConfig cfg;
    if (root.contains("space")) {
        const json& s = root.at("space");
        reject_unknown(s, {"lower", "upper", "step_sizes"}, "space");
        parse_gait_field(s, "lower", cfg.space.lower, "space");
        parse_gait_field(s, "upper", cfg.space.upper, "space");
        parse_gait_field(s, "step_sizes", cfg.space.step_sizes, "space");
    }
    if (root.contains("motor")) {
        const json& m = root.at("motor");
        reject_unknown(m, {"max_velocity", "max_acceleration"}, "motor");
        get_to(m, "max_velocity", cfg.motor.max_velocity);
        get_to(m, "max_acceleration", cfg.motor.max_acceleration);
    }
    if (root.contains("model")) {
        const json& m = root.at("model");
        reject_unknown(m, {"kind", "weights_path"}, "model");
        get_to(m, "kind", cfg.model.kind);
        get_to(m, "weights_path", cfg.model.weights_path);
    }
    if (root.contains("methods")) {
        cfg.methods.clear();
        for (const auto& name : root.at("methods"))
            cfg.methods.push_back(search_method_from_string(name.get<std::string>()));
    }
    if (root.contains("search")) {
        const json& s = root.at("search");
        reject_unknown(s,
                       {"mc_samples", "mc_radius_floor", "mesh_size", "mesh_divider", "precision",
                        "evaluation_budget", "rng_seed"},
                       "search");
        get_to(s, "mc_samples", cfg.search.mc_samples);
        get_to(s, "mc_radius_floor", cfg.search.mc_radius_floor);
        get_to(s, "mesh_size", cfg.search.mesh_size);
        get_to(s, "mesh_divider", cfg.search.mesh_divider);
        get_to(s, "precision", cfg.search.precision);
        get_to(s, "evaluation_budget", cfg.search.evaluation_budget);
        get_to(s, "rng_seed", cfg.search.rng_seed);
    }
    if (root.contains("weight_settings")) {
        cfg.weight_settings.clear();
        int idx = 0;
        for (const auto& w : root.at("weight_settings"))
            cfg.weight_settings.push_back(
                parse_weights(w, "weight_settings[" + std::to_string(idx++) + "]"));
    }
    if (root.contains("synth")) {
        const json& s = root.at("synth");
        reject_unknown(s,
                       {"delta_t_max", "requests_per_set", "request_min", "request_max",
                        "initial_gait"},
                       "synth");
        get_to(s, "delta_t_max", cfg.synth.delta_t_max);
        get_to(s, "requests_per_set", cfg.synth.requests_per_set);
        get_to(s, "request_min", cfg.synth.request_min);
        get_to(s, "request_max", cfg.synth.request_max);
        parse_gait_field(s, "initial_gait", cfg.synth.initial_gait, "synth");
    }
    if (root.contains("closed_loop")) {
        const json& c = root.at("closed_loop");
        reject_unknown(c,
                       {"target_count", "cycles_per_target", "position_min", "position_max",
                        "plant", "pid", "initial_gait"},
                       "closed_loop");
        get_to(c, "target_count", cfg.closed_loop.target_count);
        get_to(c, "cycles_per_target", cfg.closed_loop.cycles_per_target);
        get_to(c, "position_min", cfg.closed_loop.position_min);
        get_to(c, "position_max", cfg.closed_loop.position_max);
        if (c.contains("plant")) {
            const json& p = c.at("plant");
            reject_unknown(p, {"mass", "drag"}, "closed_loop.plant");
            get_to(p, "mass", cfg.closed_loop.plant.mass);
            get_to(p, "drag", cfg.closed_loop.plant.drag);
        }
        if (c.contains("pid")) {
            const json& p = c.at("pid");
            reject_unknown(p, {"kp", "ki", "kd", "output_limit", "integral_limit"},
                           "closed_loop.pid");
            get_to(p, "kp", cfg.closed_loop.pid.kp);
            get_to(p, "ki", cfg.closed_loop.pid.ki);
            get_to(p, "kd", cfg.closed_loop.pid.kd);
            get_to(p, "output_limit", cfg.closed_loop.pid.output_limit);
            get_to(p, "integral_limit", cfg.closed_loop.pid.integral_limit);
        }
        parse_gait_field(c, "initial_gait", cfg.closed_loop.initial_gait, "closed_loop");
    }
    if (root.contains("timing")) {
        const json& t = root.at("timing");
        reject_unknown(t, {"requests_per_method", "delta_t_max"}, "timing");
        get_to(t, "requests_per_method", cfg.timing.requests_per_method);
        get_to(t, "delta_t_max", cfg.timing.delta_t_max);
    }
    get_to(root, "lstm_sequence_length", cfg.lstm_sequence_length);
    get_to(root, "timing_budget_s", cfg.timing_budget_s);
    get_to(root, "seed", cfg.seed);
    get_to(root, "out_dir", cfg.out_dir);

    cfg.validate();
    return cfg;
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
    auto gait_json = [](const Gait& g) {
        return json{{"stroke_amplitude", g.stroke_amplitude},
                    {"pitch_amplitude", g.pitch_amplitude},
                    {"flap_frequency", g.flap_frequency},
                    {"stroke_pitch_offset", g.stroke_pitch_offset}};
    };
    json methods = json::array();
    for (auto m : cfg.methods) methods.push_back(to_string(m));
    json weights = json::array();
    for (const auto& w : cfg.weight_settings)
        weights.push_back({{"w_thrust", w.w_thrust},
                           {"w_kinematic", w.w_kinematic},
                           {"w_efficiency", w.w_efficiency}});

    json root{
        {"space",
         {{"lower", gait_json(cfg.space.lower)},
          {"upper", gait_json(cfg.space.upper)},
          {"step_sizes", gait_json(cfg.space.step_sizes)}}},
        {"motor",
         {{"max_velocity", cfg.motor.max_velocity},
          {"max_acceleration", cfg.motor.max_acceleration}}},
        {"model", {{"kind", cfg.model.kind}, {"weights_path", cfg.model.weights_path}}},
        {"methods", methods},
        {"search",
         {{"mc_samples", cfg.search.mc_samples},
          {"mc_radius_floor", cfg.search.mc_radius_floor},
          {"mesh_size", cfg.search.mesh_size},
          {"mesh_divider", cfg.search.mesh_divider},
          {"precision", cfg.search.precision},
          {"evaluation_budget", cfg.search.evaluation_budget},
          {"rng_seed", cfg.search.rng_seed}}},
        {"weight_settings", weights},
        {"synth",
         {{"delta_t_max", cfg.synth.delta_t_max},
          {"requests_per_set", cfg.synth.requests_per_set},
          {"request_min", cfg.synth.request_min},
          {"request_max", cfg.synth.request_max},
          {"initial_gait", gait_json(cfg.synth.initial_gait)}}},
        {"closed_loop",
         {{"target_count", cfg.closed_loop.target_count},
          {"cycles_per_target", cfg.closed_loop.cycles_per_target},
          {"position_min", cfg.closed_loop.position_min},
          {"position_max", cfg.closed_loop.position_max},
          {"plant", {{"mass", cfg.closed_loop.plant.mass}, {"drag", cfg.closed_loop.plant.drag}}},
          {"pid",
           {{"kp", cfg.closed_loop.pid.kp},
            {"ki", cfg.closed_loop.pid.ki},
            {"kd", cfg.closed_loop.pid.kd},
            {"output_limit", cfg.closed_loop.pid.output_limit},
            {"integral_limit", cfg.closed_loop.pid.integral_limit}}},
          {"initial_gait", gait_json(cfg.closed_loop.initial_gait)}}},
        {"timing",
         {{"requests_per_method", cfg.timing.requests_per_method},
          {"delta_t_max", cfg.timing.delta_t_max}}},
        {"lstm_sequence_length", cfg.lstm_sequence_length},
        {"timing_budget_s", cfg.timing_budget_s},
        {"seed", cfg.seed},
        {"out_dir", cfg.out_dir}};
    open_out(path) << root.dump(2) << '\n';
}

std::unique_ptr<ForwardModel> build_model(const RunConfig& cfg) {
    if (cfg.model.kind == "synthetic") return std::make_unique<SyntheticSurrogate>();
    auto loaded = load_weights(cfg.model.weights_path);
    if (cfg.model.kind == "lstm") {
        if (!std::holds_alternative<LstmWeights>(loaded))
            throw std::runtime_error("model.kind is lstm but the weight file is not");
        return std::make_unique<LstmModel>(std::get<LstmWeights>(std::move(loaded)), cfg.motor,
                                           cfg.lstm_sequence_length);
    }
    if (!std::holds_alternative<DnnWeights>(loaded))
        throw std::runtime_error("model.kind is dnn but the weight file is not");
    return std::make_unique<DnnModel>(std::get<DnnWeights>(std::move(loaded)));
}

SynthSweep run_synth_sweep(const RunConfig& cfg, const ForwardModel& model) {
    cfg.validate();
    SynthSweep sweep;
    const std::size_t total = cfg.synth.delta_t_max.size() * cfg.methods.size() *
                              cfg.weight_settings.size() *
                              static_cast<std::size_t>(cfg.synth.requests_per_set);
    sweep.rows.reserve(total);

    for (std::size_t d = 0; d < cfg.synth.delta_t_max.size(); ++d) {
        const ThrustRequestSet requests = generate_synthetic_requests(
            cfg.synth.requests_per_set, cfg.synth.delta_t_max[d], derive_seed(cfg.seed, d),
            cfg.synth.request_min, cfg.synth.request_max);

        // Solver seeds are shared across methods and weight settings (common
        // random numbers), so those comparisons see identical MC draws and
        // differ only through the objective.
        const std::uint64_t solver_root = derive_seed(cfg.seed, 1000003ULL + d);

        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            for (std::size_t w = 0; w < cfg.weight_settings.size(); ++w) {
                Gait gait = cfg.synth.initial_gait;

                for (int i = 0; i < cfg.synth.requests_per_set; ++i) {
                    InverseRequest req{requests.requests[i], gait, cfg.weight_settings[w]};
                    SearchConfig sc = cfg.search;
                    sc.rng_seed = derive_seed(solver_root, static_cast<std::uint64_t>(i));
                    const SearchResult res =
                        propose_gait(req, cfg.methods[m], sc, model, cfg.space);

                    SynthRow row;
                    row.dataset = static_cast<int>(d);
                    row.delta_t_max = cfg.synth.delta_t_max[d];
                    row.method = cfg.methods[m];
                    row.weight_setting = static_cast<int>(w);
                    row.request_index = i;
                    row.target_thrust = requests.requests[i];
                    row.thrust_loss = res.loss.thrust_loss;
                    row.kinematic_loss = res.loss.kinematic_loss;
                    row.efficiency_loss = res.loss.efficiency_loss;
                    row.total_loss = res.loss.total;
                    row.evaluations = res.evaluations;
                    row.time_s = res.wall_time;
                    row.budget_exhausted = res.budget_exhausted;
                    sweep.rows.push_back(row);

                    gait = res.gait;
                }
            }
        }
    }
    return sweep;
}

bool BenchReport::any_budget_violation() const {
    for (const auto& c : cells)
        if (c.time_budget_exceeded || c.eval_budget_exhausted) return true;
    return false;
}

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
}

double percentile_of(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double rank = q * static_cast<double>(values.size());
    std::size_t idx = static_cast<std::size_t>(std::ceil(rank));
    if (idx > 0) --idx;
    if (idx >= values.size()) idx = values.size() - 1;
    return values[idx];
}

namespace {

std::vector<double> ranks_of(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman: need two equal-length series");
    const auto ra = ranks_of(a);
    const auto rb = ranks_of(b);
    const double ma = mean_of(ra), mb = mean_of(rb);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

BenchReport cmd_synth(const RunConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    const auto model = build_model(cfg);
    const SynthSweep sweep = run_synth_sweep(cfg, *model);
    const std::filesystem::path out(cfg.out_dir);

    {
        auto results = open_out(out / "synth_results.csv");
        results << "method,w_thrust,w_kinematic,w_efficiency,delta_t_max,request_index,"
                   "target_thrust,thrust_loss,kinematic_loss,efficiency_loss,total_loss,"
                   "evaluations,budget_exhausted\n";
        for (const auto& r : sweep.rows) {
            const auto& w = cfg.weight_settings[r.weight_setting];
            results << to_string(r.method) << ',' << fmt_double(w.w_thrust) << ','
                    << fmt_double(w.w_kinematic) << ',' << fmt_double(w.w_efficiency) << ','
                    << fmt_double(r.delta_t_max) << ',' << r.request_index << ','
                    << fmt_double(r.target_thrust) << ',' << fmt_double(r.thrust_loss) << ','
                    << fmt_double(r.kinematic_loss) << ',' << fmt_double(r.efficiency_loss) << ','
                    << fmt_double(r.total_loss) << ',' << r.evaluations << ','
                    << (r.budget_exhausted ? 1 : 0) << '\n';
        }
    }
    {
        auto timing = open_out(out / "synth_timing.csv");
        timing << "method,w_thrust,w_kinematic,delta_t_max,request_index,time_s\n";
        for (const auto& r : sweep.rows) {
            const auto& w = cfg.weight_settings[r.weight_setting];
            timing << to_string(r.method) << ',' << fmt_double(w.w_thrust) << ','
                   << fmt_double(w.w_kinematic) << ',' << fmt_double(r.delta_t_max) << ','
                   << r.request_index << ',' << fmt_double(r.time_s) << '\n';
        }
    }
    {
        // Per-dataset means, the rows a loss-versus-step-size plot reads.
        auto by_delta = open_out(out / "synth_by_delta.csv");
        by_delta << "method,w_thrust,w_kinematic,delta_t_max,requests,mean_thrust_loss,"
                    "mean_kinematic_loss,mean_total_loss\n";
        for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
            for (std::size_t w = 0; w < cfg.weight_settings.size(); ++w) {
                for (std::size_t d = 0; d < cfg.synth.delta_t_max.size(); ++d) {
                    std::vector<double> lt, lk, tot;
                    for (const auto& r : sweep.rows) {
                        if (r.method == cfg.methods[m] &&
                            r.weight_setting == static_cast<int>(w) &&
                            r.dataset == static_cast<int>(d)) {
                            lt.push_back(r.thrust_loss);
                            lk.push_back(r.kinematic_loss);
                            tot.push_back(r.total_loss);
                        }
                    }
                    by_delta << to_string(cfg.methods[m]) << ','
                             << fmt_double(cfg.weight_settings[w].w_thrust) << ','
                             << fmt_double(cfg.weight_settings[w].w_kinematic) << ','
                             << fmt_double(cfg.synth.delta_t_max[d]) << ',' << lt.size() << ','
                             << fmt_double(mean_of(lt)) << ',' << fmt_double(mean_of(lk)) << ','
                             << fmt_double(mean_of(tot)) << '\n';
                }
            }
        }
    }

    BenchReport report;
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        for (std::size_t w = 0; w < cfg.weight_settings.size(); ++w) {
            std::vector<double> lt, lk, tot;
            CellTimes ct;
            for (const auto& r : sweep.rows) {
                if (r.method != cfg.methods[m] || r.weight_setting != static_cast<int>(w))
                    continue;
                lt.push_back(r.thrust_loss);
                lk.push_back(r.kinematic_loss);
                tot.push_back(r.total_loss);
                ct.times.push_back(r.time_s);
                ct.evals.push_back(static_cast<double>(r.evaluations));
                ct.eval_budget_exhausted |= r.budget_exhausted;
            }
            report.cells.push_back(make_cell(cfg.methods[m], cfg.weight_settings[w], lt, lk, tot,
                                             ct, cfg.timing_budget_s));
        }
    }
    write_cell_summary(out / "synth_summary.csv", report.cells);
    write_timing_summary(out / "synth_timing_summary.csv", report.cells);
    write_meta(cfg, "synth");
    return report;
}

BenchReport cmd_simulate(const RunConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    const auto model = build_model(cfg);
    const std::filesystem::path out(cfg.out_dir);

    std::mt19937_64 rng(derive_seed(cfg.seed, 0xC105EDULL));
    std::uniform_real_distribution<double> pos(cfg.closed_loop.position_min,
                                               cfg.closed_loop.position_max);
    std::vector<double> targets(cfg.closed_loop.target_count);
    for (double& t : targets) t = pos(rng);

    BenchReport report;
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        for (std::size_t w = 0; w < cfg.weight_settings.size(); ++w) {
            ClosedLoopSetup setup;
            setup.plant = cfg.closed_loop.plant;
            setup.pid = cfg.closed_loop.pid;
            setup.initial_gait = cfg.closed_loop.initial_gait;
            setup.cycles_per_target = cfg.closed_loop.cycles_per_target;
            setup.weights = cfg.weight_settings[w];
            setup.search = cfg.search;
            setup.search.rng_seed = derive_seed(cfg.seed, 5000017ULL * m + w);
            setup.method = cfg.methods[m];

            const ClosedLoopResult run = run_closed_loop(targets, setup, *model, cfg.space);

            const std::string name = std::string("trajectory_") + to_string(cfg.methods[m]) +
                                     "_" + weights_tag(cfg.weight_settings[w]) + ".csv";
            auto traj = open_out(out / name);
            traj << "cycle,target_position,position,thrust_request,realized_thrust,stroke_amp,"
                    "pitch_amp,flap_freq,offset,L_t,L_k,L_total,solver_ms\n";
            std::vector<double> lt, lk, tot;
            CellTimes ct;
            for (const auto& r : run.records) {
                traj << r.cycle << ',' << fmt_double(r.target_position) << ','
                     << fmt_double(r.position) << ',' << fmt_double(r.thrust_request) << ','
                     << fmt_double(r.realized_thrust) << ','
                     << fmt_double(r.gait.stroke_amplitude) << ','
                     << fmt_double(r.gait.pitch_amplitude) << ','
                     << fmt_double(r.gait.flap_frequency) << ','
                     << fmt_double(r.gait.stroke_pitch_offset) << ','
                     << fmt_double(r.thrust_loss) << ',' << fmt_double(r.kinematic_loss) << ','
                     << fmt_double(r.total_loss) << ',' << fmt_double(r.solver_ms) << '\n';
                lt.push_back(r.thrust_loss);
                lk.push_back(r.kinematic_loss);
                tot.push_back(r.total_loss);
                ct.times.push_back(r.solver_ms / 1000.0);
                ct.evals.push_back(static_cast<double>(r.evaluations));
                ct.eval_budget_exhausted |= r.budget_exhausted;
            }
            report.cells.push_back(make_cell(cfg.methods[m], cfg.weight_settings[w], lt, lk, tot,
                                             ct, cfg.timing_budget_s));
        }
    }

    // Method-level table: losses averaged across weight settings, worst-case
    // solver time across every call.
    {
        auto summary = open_out(out / "simulate_summary.csv");
        summary << "metric";
        for (auto m : cfg.methods) summary << ',' << to_string(m);
        summary << '\n';
        const char* metric_names[4] = {"thrust_loss_n", "kinematic_loss", "overall_loss",
                                       "max_time_s"};
        for (int metric = 0; metric < 4; ++metric) {
            summary << metric_names[metric];
            for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
                double acc = 0.0;
                int count = 0;
                double worst = 0.0;
                for (const auto& c : report.cells) {
                    if (c.method != cfg.methods[m]) continue;
                    ++count;
                    switch (metric) {
                    case 0: acc += c.mean_thrust_loss; break;
                    case 1: acc += c.mean_kinematic_loss; break;
                    case 2: acc += c.mean_total_loss; break;
                    case 3: worst = std::max(worst, c.max_time_s); break;
                    }
                }
                summary << ','
                        << fmt_double(metric == 3 ? worst : (count ? acc / count : 0.0));
            }
            summary << '\n';
        }
    }
    write_cell_summary(out / "simulate_cells.csv", report.cells);
    write_timing_summary(out / "simulate_timing_summary.csv", report.cells);
    write_meta(cfg, "simulate");
    return report;
}

BenchReport cmd_bench_timing(const RunConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    const auto model = build_model(cfg);
    const std::filesystem::path out(cfg.out_dir);

    auto calls = open_out(out / "timing_calls.csv");
    calls << "method,request_index,time_s,evaluations\n";

    BenchReport report;
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        const ThrustRequestSet requests = generate_synthetic_requests(
            cfg.timing.requests_per_method, cfg.timing.delta_t_max,
            derive_seed(cfg.seed, 0x71713ULL + m), cfg.synth.request_min, cfg.synth.request_max);

        Gait gait = cfg.synth.initial_gait;
        const LossWeights& weights = cfg.weight_settings.front();
        std::vector<double> lt, lk, tot;
        CellTimes ct;
        for (int i = 0; i < cfg.timing.requests_per_method; ++i) {
            InverseRequest req{requests.requests[i], gait, weights};
            SearchConfig sc = cfg.search;
            sc.rng_seed = derive_seed(cfg.seed, 9000011ULL * m + i);
            const SearchResult res = propose_gait(req, cfg.methods[m], sc, *model, cfg.space);
            calls << to_string(cfg.methods[m]) << ',' << i << ',' << fmt_double(res.wall_time)
                  << ',' << res.evaluations << '\n';
            lt.push_back(res.loss.thrust_loss);
            lk.push_back(res.loss.kinematic_loss);
            tot.push_back(res.loss.total);
            ct.times.push_back(res.wall_time);
            ct.evals.push_back(static_cast<double>(res.evaluations));
            ct.eval_budget_exhausted |= res.budget_exhausted;
            gait = res.gait;
        }
        report.cells.push_back(
            make_cell(cfg.methods[m], weights, lt, lk, tot, ct, cfg.timing_budget_s));
    }
    write_timing_summary(out / "timing_summary.csv", report.cells);
    write_meta(cfg, "bench-timing");
    return report;
}

} // namespace fingait
