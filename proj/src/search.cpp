#include "fingait/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace fingait {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMcRejectionBudget = 1000; // redraw attempts per accepted sample
constexpr long kOuterIterationCap = 1000000;

struct EvalOutcome {
    LossBreakdown loss;
    bool feasible = false;

    double total() const { return feasible ? loss.total : kInf; }
};

struct GaitKey {
    std::array<std::uint64_t, 4> bits;

    bool operator==(const GaitKey&) const = default;
};

struct GaitKeyHash {
    std::size_t operator()(const GaitKey& k) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (std::uint64_t b : k.bits) {
            h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

GaitKey key_of(const NormalizedGait& y) {
    GaitKey k{};
    static_assert(sizeof(k.bits) == sizeof(y));
    std::memcpy(k.bits.data(), y.data(), sizeof(k.bits));
    return k;
}

// Loss evaluations for one solver call.  Out-of-bounds and unattainable
// points are infeasible (infinite loss), never projected back.  Results are
// memoized by exact coordinates; mesh walks revisit points often.  Once the
// evaluation budget is spent every fresh point reports infeasible, which
// winds the search down to its incumbent.
class Objective {
public:
    Objective(const InverseRequest& req, const SearchConfig& cfg, const ForwardModel& model,
              const KinematicSpace& space)
        : req_(req), cfg_(cfg), model_(model), space_(space) {}

    const EvalOutcome& evaluate(const NormalizedGait& y) {
        const GaitKey key = key_of(y);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;

        EvalOutcome out;
        const Gait g = space_.denormalize(y);
        if (space_.contains(g) && is_attainable(g)) {
            if (evaluations_ >= cfg_.evaluation_budget) {
                budget_exhausted_ = true;
            } else {
                ++evaluations_;
                out.loss = total_loss(req_.target_thrust, req_.current_gait, g, req_.weights,
                                      model_, space_);
                out.feasible = true;
            }
        }
        return cache_.emplace(key, out).first->second;
    }

    long evaluations() const { return evaluations_; }
    bool budget_exhausted() const { return budget_exhausted_; }

private:
    const InverseRequest& req_;
    const SearchConfig& cfg_;
    const ForwardModel& model_;
    const KinematicSpace& space_;
    std::unordered_map<GaitKey, EvalOutcome, GaitKeyHash> cache_;
    long evaluations_ = 0;
    bool budget_exhausted_ = false;
};

void validate_inputs(const InverseRequest& req, const SearchConfig& cfg,
                     const KinematicSpace& space) {
    space.validate();
    cfg.validate();
    req.weights.validate();
    if (!space.contains(req.current_gait) || !is_attainable(req.current_gait))
        throw std::invalid_argument("search: current gait is outside the searchable space");
}

NormalizedGait offset_axis(const NormalizedGait& y, std::size_t axis, double delta) {
    NormalizedGait t = y;
    t[axis] += delta;
    return t;
}

NormalizedGait add(const NormalizedGait& y, const NormalizedGait& v) {
    NormalizedGait t = y;
    for (std::size_t i = 0; i < kGaitDims; ++i) t[i] += v[i];
    return t;
}

struct PollOutcome {
    bool improved = false;
    NormalizedGait end{};
    double f_end = kInf;
    // Populated when the poll fails: per-axis direction (+/-mesh) with the
    // smaller loss increase, and that increase.
    std::array<double, 4> fallback_step{};
    std::array<double, 4> fallback_increase{};
};

// Classic exploratory move: walk the axes in order, keep the first improving
// direction per axis, carry accepted changes into the later axes.  On a full
// failure all eight trials share the poll center, which is what the
// composite fallback needs.
PollOutcome exploratory_poll(Objective& obj, const NormalizedGait& y, double f, double mesh) {
    PollOutcome poll;
    NormalizedGait w = y;
    double fw = f;
    for (std::size_t axis = 0; axis < kGaitDims; ++axis) {
        const double f_plus = obj.evaluate(offset_axis(w, axis, mesh)).total();
        if (f_plus < fw) {
            w = offset_axis(w, axis, mesh);
            fw = f_plus;
            poll.improved = true;
            continue;
        }
        const double f_minus = obj.evaluate(offset_axis(w, axis, -mesh)).total();
        if (f_minus < fw) {
            w = offset_axis(w, axis, -mesh);
            fw = f_minus;
            poll.improved = true;
            continue;
        }
        if (f_plus <= f_minus) {
            poll.fallback_step[axis] = mesh;
            poll.fallback_increase[axis] = f_plus - fw;
        } else {
            poll.fallback_step[axis] = -mesh;
            poll.fallback_increase[axis] = f_minus - fw;
        }
    }
    poll.end = w;
    poll.f_end = fw;
    return poll;
}

// Repeated translation by the displacement the poll just accepted.
void pattern_moves(Objective& obj, NormalizedGait& y, double& f, const PollOutcome& poll) {
    NormalizedGait v{};
    for (std::size_t i = 0; i < kGaitDims; ++i) v[i] = poll.end[i] - y[i];
    y = poll.end;
    f = poll.f_end;
    while (true) {
        const NormalizedGait trial = add(y, v);
        const double ft = obj.evaluate(trial).total();
        if (!(ft < f)) break;
        y = trial;
        f = ft;
    }
}

// Composite search run when every axis poll failed.  Sums the per-axis
// least-bad directions into one vector, walks along it while the loss keeps
// dropping, and on failure retries with the worst component removed, down to
// a single component (that last trial is a repeat of the failed axis poll and
// resolves from the evaluation cache).  Returns true if the incumbent moved;
// the caller then re-polls from the new point instead of shrinking the mesh.
bool search_upon_failure(Objective& obj, NormalizedGait& y, double& f, const PollOutcome& poll) {
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return poll.fallback_increase[a] < poll.fallback_increase[b];
    });

    for (int j = static_cast<int>(kGaitDims) - 1; j >= 0; --j) {
        NormalizedGait v{};
        for (int t = 0; t <= j; ++t) v[order[t]] = poll.fallback_step[order[t]];

        bool moved = false;
        while (true) {
            const NormalizedGait trial = add(y, v);
            const double ft = obj.evaluate(trial).total();
            if (!(ft < f)) break;
            y = trial;
            f = ft;
            moved = true;
        }
        if (moved) return true;
    }
    return false;
}

SearchResult finish(const NormalizedGait& y, Objective& obj, const KinematicSpace& space,
                    std::chrono::steady_clock::time_point t0) {
    SearchResult res;
    res.gait = space.denormalize(y);
    res.loss = obj.evaluate(y).loss;
    res.evaluations = obj.evaluations();
    res.budget_exhausted = obj.budget_exhausted();
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

SearchResult pattern_search(const InverseRequest& req, const SearchConfig& cfg,
                            const ForwardModel& model, const KinematicSpace& space,
                            bool composite_fallback) {
    const auto t0 = std::chrono::steady_clock::now();
    validate_inputs(req, cfg, space);

    Objective obj(req, cfg, model, space);
    NormalizedGait y = space.normalize(req.current_gait);
    double f = obj.evaluate(y).total();

    double mesh = cfg.mesh_size;
    long iterations = 0;
    while (mesh >= cfg.precision) {
        if (++iterations > kOuterIterationCap)
            throw std::logic_error("pattern search exceeded its iteration cap");

        const PollOutcome poll = exploratory_poll(obj, y, f, mesh);
        if (poll.improved) {
            pattern_moves(obj, y, f, poll);
            continue;
        }
        if (composite_fallback && search_upon_failure(obj, y, f, poll)) continue;
        mesh /= cfg.mesh_divider;
    }
    return finish(y, obj, space, t0);
}

} // namespace

const char* to_string(SearchMethod m) {
    switch (m) {
    case SearchMethod::kMonteCarlo: return "mc";
    case SearchMethod::kHookeJeeves: return "hjps";
    case SearchMethod::kGps: return "gps";
    }
    return "unknown";
}

SearchMethod search_method_from_string(const std::string& name) {
    if (name == "mc") return SearchMethod::kMonteCarlo;
    if (name == "hjps") return SearchMethod::kHookeJeeves;
    if (name == "gps") return SearchMethod::kGps;
    throw std::invalid_argument("unknown search method '" + name + "'");
}

void SearchConfig::validate() const {
    if (mc_samples < 1) throw std::invalid_argument("SearchConfig: mc_samples must be >= 1");
    if (!(mc_radius_floor > 0.0))
        throw std::invalid_argument("SearchConfig: mc_radius_floor must be positive");
    if (!(precision > 0.0)) throw std::invalid_argument("SearchConfig: precision must be positive");
    if (!(mesh_size >= precision))
        throw std::invalid_argument("SearchConfig: mesh_size must be >= precision");
    if (!(mesh_divider > 1.0))
        throw std::invalid_argument("SearchConfig: mesh_divider must be > 1");
    if (evaluation_budget < 1)
        throw std::invalid_argument("SearchConfig: evaluation_budget must be >= 1");
}

double mc_search_radius(double thrust_gap, const SearchConfig& cfg) {
    return std::max(std::abs(thrust_gap) / 10.0, cfg.mc_radius_floor);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SearchResult monte_carlo_step(const InverseRequest& req, const SearchConfig& cfg,
                              const ForwardModel& model, const KinematicSpace& space) {
    const auto t0 = std::chrono::steady_clock::now();
    validate_inputs(req, cfg, space);

    Objective obj(req, cfg, model, space);
    const NormalizedGait y0 = space.normalize(req.current_gait);

    NormalizedGait best = y0;
    double f_best = obj.evaluate(y0).total();
    const double radius = mc_search_radius(obj.evaluate(y0).loss.thrust_loss, cfg);

    std::mt19937_64 rng(cfg.rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int k = 0; k < cfg.mc_samples; ++k) {
        // Uniform draw from the open ball: Gaussian direction, radius
        // scaled by U^(1/4).  Redraws replace rejected points; a sample is
        // abandoned once its rejection budget runs out.
        for (int attempt = 0; attempt < kMcRejectionBudget; ++attempt) {
            NormalizedGait dir;
            double norm2 = 0.0;
            for (std::size_t i = 0; i < kGaitDims; ++i) {
                dir[i] = gauss(rng);
                norm2 += dir[i] * dir[i];
            }
            if (norm2 == 0.0) continue;
            const double scale =
                radius * std::pow(unit(rng), 1.0 / static_cast<double>(kGaitDims)) /
                std::sqrt(norm2);

            NormalizedGait y = y0;
            for (std::size_t i = 0; i < kGaitDims; ++i) y[i] += dir[i] * scale;

            const Gait g = space.denormalize(y);
            if (!space.contains(g) || !is_attainable(g)) continue;

            const double ft = obj.evaluate(y).total();
            if (ft < f_best) {
                best = y;
                f_best = ft;
            }
            break;
        }
    }
    return finish(best, obj, space, t0);
}

SearchResult hjps_step(const InverseRequest& req, const SearchConfig& cfg,
                       const ForwardModel& model, const KinematicSpace& space) {
    return pattern_search(req, cfg, model, space, /*composite_fallback=*/false);
}

SearchResult gps_step(const InverseRequest& req, const SearchConfig& cfg,
                      const ForwardModel& model, const KinematicSpace& space) {
    return pattern_search(req, cfg, model, space, /*composite_fallback=*/true);
}

SearchResult propose_gait(const InverseRequest& req, SearchMethod method, const SearchConfig& cfg,
                          const ForwardModel& model, const KinematicSpace& space) {
    switch (method) {
    case SearchMethod::kMonteCarlo: return monte_carlo_step(req, cfg, model, space);
    case SearchMethod::kHookeJeeves: return hjps_step(req, cfg, model, space);
    case SearchMethod::kGps: return gps_step(req, cfg, model, space);
    }
    throw std::invalid_argument("propose_gait: unknown method");
}

} // namespace fingait
