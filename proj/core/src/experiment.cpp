#include "odel/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "odel/balancers.hpp"
#include "odel/csv.hpp"
#include "odel/envy_alloc.hpp"
#include "odel/multicolor.hpp"

namespace odel {

using nlohmann::json;

namespace {

// Fixed substream ids so every run derives its source, algorithm, and tree
// streams from one seed.
constexpr std::uint64_t kSourceStream = 0x51;
constexpr std::uint64_t kAlgoStream = 0xA1;
constexpr std::uint64_t kTreeStream = 0x7E;
constexpr std::uint64_t kProbeStream = 0xB0;

double median_of(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

class Stopwatch {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::balance: return "balance";
        case Mode::multicolor: return "multicolor";
        case Mode::envy: return "envy";
        case Mode::lowerbound: return "lowerbound";
        case Mode::verify: return "verify";
    }
    return "unknown";
}

Mode parse_mode(const std::string& name) {
    if (name == "balance") return Mode::balance;
    if (name == "multicolor") return Mode::multicolor;
    if (name == "envy") return Mode::envy;
    if (name == "lowerbound") return Mode::lowerbound;
    if (name == "verify") return Mode::verify;
    throw std::invalid_argument("unknown mode: " + name);
}

// ---------------------------------------------------------------------------
// JSON round-trip.

namespace {

DistributionSpec dist_from_json(const json& j) {
    const std::string kind = j.value("kind", "uniform01");
    if (kind == "uniform01") return DistributionSpec::uniform01();
    if (kind == "uniform_pm1") return DistributionSpec::uniform_pm1();
    if (kind == "bernoulli") return DistributionSpec::bernoulli(j.value("p", 0.5));
    if (kind == "beta") return DistributionSpec::beta(j.value("a", 0.5), j.value("b", 0.5));
    if (kind == "point_mass") return DistributionSpec::point_mass(j.value("x", 1.0));
    if (kind == "two_point")
        return DistributionSpec::two_point(j.value("x", 0.0), j.value("y", 1.0), j.value("p", 0.5));
    throw std::invalid_argument("unknown distribution kind: " + kind);
}

json dist_to_json(const DistributionSpec& d) {
    json j;
    switch (d.kind) {
        case DistributionSpec::Kind::uniform01: j["kind"] = "uniform01"; break;
        case DistributionSpec::Kind::uniform_pm1: j["kind"] = "uniform_pm1"; break;
        case DistributionSpec::Kind::bernoulli:
            j["kind"] = "bernoulli";
            j["p"] = d.p;
            break;
        case DistributionSpec::Kind::beta:
            j["kind"] = "beta";
            j["a"] = d.a;
            j["b"] = d.b;
            break;
        case DistributionSpec::Kind::point_mass:
            j["kind"] = "point_mass";
            j["x"] = d.x;
            break;
        case DistributionSpec::Kind::two_point:
            j["kind"] = "two_point";
            j["x"] = d.x;
            j["y"] = d.y;
            j["p"] = d.p;
            break;
    }
    return j;
}

void read_params(const json& j, ExperimentConfig& cfg) {
    cfg.c_param = j.value("c_param", cfg.c_param);
    cfg.c = j.value("c", cfg.c);
    cfg.r = j.value("r", cfg.r);
    cfg.K = j.value("K", cfg.K);
    cfg.delta = j.value("delta", cfg.delta);
    if (j.contains("scale")) {
        const std::string s = j.at("scale").get<std::string>();
        if (s == "raw") cfg.scale = VectorScale::raw;
        else if (s == "inv_sqrt_d") cfg.scale = VectorScale::inv_sqrt_d;
        else throw std::invalid_argument("unknown scale: " + s);
    }
    if (j.contains("log_base")) {
        const auto& lb = j.at("log_base");
        if (lb.is_string()) {
            const std::string s = lb.get<std::string>();
            if (s == "e") cfg.log_base = 2.718281828459045;
            else if (s == "2") cfg.log_base = 2.0;
            else if (s == "10") cfg.log_base = 10.0;
            else throw std::invalid_argument("unknown log_base: " + s);
        } else {
            cfg.log_base = lb.get<double>();
        }
    }
}

ProbeConfig probe_from_json(const json& j) {
    ProbeConfig p;
    p.probe = j.at("probe").get<std::string>();
    p.K = j.value("K", p.K);
    p.L = j.value("L", p.L);
    p.c = j.value("c", p.c);
    if (j.contains("dist")) p.dist = dist_from_json(j.at("dist"));
    p.trials = j.value("trials", p.trials);
    p.instances = j.value("instances", p.instances);
    p.n = j.value("n", p.n);
    p.samples = j.value("samples", p.samples);
    p.tol = j.value("tol", p.tol);
    p.d = j.value("d", p.d);
    p.delta = j.value("delta", p.delta);
    p.floor = j.value("floor", p.floor);
    p.bound = j.value("bound", p.bound);
    return p;
}

json probe_to_json(const ProbeConfig& p) {
    return json{{"probe", p.probe},     {"K", p.K},           {"L", p.L},
                {"c", p.c},             {"dist", dist_to_json(p.dist)},
                {"trials", p.trials},   {"instances", p.instances},
                {"n", p.n},             {"samples", p.samples},
                {"tol", p.tol},         {"d", p.d},
                {"delta", p.delta},     {"floor", p.floor},
                {"bound", p.bound}};
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig cfg;
    cfg.mode = parse_mode(j.value("mode", "envy"));
    cfg.algorithm = j.value("algorithm", cfg.algorithm);
    if (j.contains("adversary")) {
        const auto& adv = j.at("adversary");
        if (adv.is_string()) {
            cfg.adversary = adv.get<std::string>();
        } else {
            cfg.adversary = adv.value("kind", cfg.adversary);
            if (adv.contains("dist")) cfg.dist = dist_from_json(adv.at("dist"));
            if (adv.contains("path")) cfg.stream_path = adv.at("path").get<std::string>();
        }
    }
    cfg.n = j.value("n", cfg.n);
    cfg.d = j.value("d", cfg.d);
    cfg.T = j.value("T", cfg.T);
    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        if (s.is_array()) {
            cfg.seeds = s.get<std::vector<std::uint64_t>>();
        } else {
            const std::uint64_t base = s.value("base_seed", 1ULL);
            const std::uint64_t count = s.value("count", 1ULL);
            cfg.seeds.clear();
            for (std::uint64_t i = 0; i < count; ++i) cfg.seeds.push_back(base + i);
        }
    }
    read_params(j, cfg);
    if (j.contains("params")) read_params(j.at("params"), cfg);
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.record_every = j.value("record_every", cfg.record_every);
    cfg.quiet = j.value("quiet", cfg.quiet);
    if (j.contains("sweep_T")) cfg.sweep_T = j.at("sweep_T").get<std::vector<long long>>();
    if (j.contains("probes"))
        for (const auto& pj : j.at("probes")) cfg.probes.push_back(probe_from_json(pj));
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

namespace {

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["mode"] = mode_name(cfg.mode);
    j["algorithm"] = cfg.algorithm;
    j["adversary"] = {{"kind", cfg.adversary}, {"dist", dist_to_json(cfg.dist)}};
    if (!cfg.stream_path.empty()) j["adversary"]["path"] = cfg.stream_path;
    j["n"] = cfg.n;
    j["d"] = cfg.d;
    j["T"] = cfg.T;
    j["seeds"] = cfg.seeds;
    j["params"] = {{"c_param", cfg.c_param}, {"c", cfg.c},          {"r", cfg.r},
                   {"K", cfg.K},             {"delta", cfg.delta},
                   {"scale", cfg.scale == VectorScale::raw ? "raw" : "inv_sqrt_d"},
                   {"log_base", cfg.log_base}};
    j["record_every"] = cfg.record_every;
    j["out"] = cfg.out_dir;
    j["quiet"] = cfg.quiet;
    if (!cfg.sweep_T.empty()) j["sweep_T"] = cfg.sweep_T;
    if (!cfg.probes.empty()) {
        json arr = json::array();
        for (const auto& p : cfg.probes) arr.push_back(probe_to_json(p));
        j["probes"] = arr;
    }
    return j;
}

} // namespace

std::string ExperimentConfig::to_json_text() const { return config_to_json(*this).dump(2); }

// ---------------------------------------------------------------------------
// Validation and registries.

namespace {

const std::vector<std::string>& algorithms_for(Mode mode) {
    static const std::vector<std::string> balance = {"greedy", "random", "self_balancing"};
    static const std::vector<std::string> multicolor = {"color_tree"};
    static const std::vector<std::string> envy = {"welfare_max", "two_phase", "discrepancy_tree", "random"};
    static const std::vector<std::string> lowerbound = {"random", "welfare_max", "two_phase", "astar"};
    static const std::vector<std::string> verify = {};
    switch (mode) {
        case Mode::balance: return balance;
        case Mode::multicolor: return multicolor;
        case Mode::envy: return envy;
        case Mode::lowerbound: return lowerbound;
        case Mode::verify: return verify;
    }
    return verify;
}

const std::vector<std::string>& adversaries_for(Mode mode) {
    static const std::vector<std::string> vec = {"orthogonal", "iid_vec", "sphere", "replay"};
    static const std::vector<std::string> multicolor = {"iid_vec", "sphere", "replay"};
    static const std::vector<std::string> envy = {"iid", "oblivious_sampled", "replay"};
    static const std::vector<std::string> lowerbound = {"adaptive_lr", "oblivious_sampled", "iid"};
    static const std::vector<std::string> verify = {};
    switch (mode) {
        case Mode::balance: return vec;
        case Mode::multicolor: return multicolor;
        case Mode::envy: return envy;
        case Mode::lowerbound: return lowerbound;
        case Mode::verify: return verify;
    }
    return verify;
}

bool contains(const std::vector<std::string>& xs, const std::string& x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

} // namespace

void ExperimentConfig::validate() const {
    if (T < 1) throw std::invalid_argument("config: T must be >= 1");
    if (record_every < 1) throw std::invalid_argument("config: record_every must be >= 1");
    if (seeds.empty()) throw std::invalid_argument("config: need at least one seed");
    if (mode == Mode::verify) return; // probes validate their own parameters
    if (!contains(algorithms_for(mode), algorithm))
        throw std::invalid_argument("config: unknown algorithm '" + algorithm + "' for mode " + mode_name(mode));
    if (!contains(adversaries_for(mode), adversary))
        throw std::invalid_argument("config: unknown adversary '" + adversary + "' for mode " + mode_name(mode));
    if (mode == Mode::balance && d < 1) throw std::invalid_argument("config: d must be >= 1");
    if (mode == Mode::balance && adversary == "orthogonal" && d < 2)
        throw std::invalid_argument("config: orthogonal adversary requires d >= 2");
    if ((mode == Mode::envy || mode == Mode::lowerbound) && n < 2)
        throw std::invalid_argument("config: envy modes require n >= 2");
    if (mode == Mode::multicolor && n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (adversary == "iid" && !dist.supported_in_01())
        throw std::invalid_argument("config: iid value distribution support must lie in [0, 1]");
    if (adversary == "replay" && stream_path.empty())
        throw std::invalid_argument("config: replay adversary needs adversary.path");
    if (algorithm == "astar") {
        if (n != 2) throw std::invalid_argument("config: astar runs with exactly two agents");
        if (adversary != "adaptive_lr")
            throw std::invalid_argument("config: astar requires the adaptive_lr adversary");
        if (T % 2 != 0) throw std::invalid_argument("config: astar requires even T");
        if (K < 0 || K > T / 2) throw std::invalid_argument("config: astar requires 0 <= K <= T/2");
    }
}

// ---------------------------------------------------------------------------
// Single-run engines.

namespace {

std::unique_ptr<VectorSource> make_vector_source(const ExperimentConfig& cfg, RngSeed source_seed) {
    if (cfg.adversary == "orthogonal") return std::make_unique<OrthogonalAdversarySource>(cfg.d, cfg.T);
    if (cfg.adversary == "iid_vec")
        return std::make_unique<IidVectorSource>(cfg.d, cfg.T, cfg.scale, source_seed);
    if (cfg.adversary == "sphere") return std::make_unique<SphereVectorSource>(cfg.d, cfg.T, source_seed);
    if (cfg.adversary == "replay") {
        std::vector<VectorItem> items;
        for (const auto& row : read_stream_csv(cfg.stream_path)) {
            if (!row.is_vector)
                throw std::invalid_argument("replay: expected vec rows in " + cfg.stream_path);
            VectorItem v{row.values};
            validate_vector_item(v, false);
            items.push_back(std::move(v));
        }
        return std::make_unique<FixedVectorSource>(std::move(items));
    }
    throw std::invalid_argument("unknown vector adversary: " + cfg.adversary);
}

std::unique_ptr<ValueSource> make_value_source(const ExperimentConfig& cfg, RngSeed source_seed) {
    if (cfg.adversary == "iid") return std::make_unique<IidValueSource>(cfg.n, cfg.T, cfg.dist, source_seed);
    if (cfg.adversary == "adaptive_lr") return std::make_unique<AdaptiveLRSource>(cfg.r, cfg.n, cfg.T);
    if (cfg.adversary == "oblivious_sampled") {
        auto items = oblivious_sampled_instance(cfg.T, cfg.delta, cfg.r, source_seed);
        if (cfg.n > 2)
            for (auto& g : items) g.values.resize(static_cast<std::size_t>(cfg.n), 0.0);
        return std::make_unique<FixedValueSource>(std::move(items));
    }
    if (cfg.adversary == "replay") {
        std::vector<ValueItem> items;
        for (const auto& row : read_stream_csv(cfg.stream_path)) {
            if (row.is_vector)
                throw std::invalid_argument("replay: expected val rows in " + cfg.stream_path);
            ValueItem g{row.values};
            validate_value_item(g);
            items.push_back(std::move(g));
        }
        return std::make_unique<FixedValueSource>(std::move(items));
    }
    throw std::invalid_argument("unknown value adversary: " + cfg.adversary);
}

struct Recorder {
    explicit Recorder(long long stride) : stride_(stride) {}

    bool due(long long t, long long horizon) const { return t % stride_ == 0 || t == horizon; }

    long long stride_;
};

RunResult run_balance_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    Stopwatch timer;
    RunResult result;
    result.seed = seed;
    const RngSeed base{seed, 0};
    const double c_param = cfg.c_param > 0.0 ? cfg.c_param : default_c_param(cfg.d, cfg.T);
    BalancerState state(cfg.d, c_param);
    Rng algo_rng(substream(base, kAlgoStream));
    auto source = make_vector_source(cfg, substream(base, kSourceStream));
    const Recorder recorder(cfg.record_every);
    double running_max = 0.0;
    while (auto v = source->next(state.d_vec)) {
        if (cfg.algorithm == "greedy") greedy_sign(state, v->coords);
        else if (cfg.algorithm == "random") random_sign(state, v->coords, algo_rng);
        else self_balancing_sign(state, v->coords, algo_rng);
        const double metric = linf_norm(state.d_vec);
        if (!std::isfinite(metric)) {
            result.failed = true;
            break;
        }
        running_max = std::max(running_max, metric);
        if (recorder.due(state.t, cfg.T)) {
            ExperimentRecord rec;
            rec.t = state.t;
            rec.metric = metric;
            rec.monitors["running_max"] = running_max;
            rec.monitors["clamp_count"] = static_cast<double>(state.clamp_count);
            result.records.push_back(std::move(rec));
        }
        result.final_metric = metric;
    }
    result.max_metric = running_max;
    result.monitors["clamp_count"] = static_cast<double>(state.clamp_count);
    double norm_sq = 0.0;
    for (double x : state.d_vec) norm_sq += x * x;
    result.monitors["final_norm_sq"] = norm_sq;
    result.wall_ms = timer.ms();
    return result;
}

// Incremental pairwise discrepancy: only pairs touching the ingested color
// change, so per-step work is O(n d) instead of O(n^2 d).
struct PairwiseTracker {
    PairwiseTracker(int n, int dim) : n_(n), dim_(dim), norms_(static_cast<std::size_t>(n) * n, 0.0) {}

    void update(const DiscrepancyState& disc, int color) {
        for (int j = 0; j < n_; ++j) {
            if (j == color) continue;
            const auto& a = disc.color_sums[static_cast<std::size_t>(color)];
            const auto& b = disc.color_sums[static_cast<std::size_t>(j)];
            double m = 0.0;
            for (int k = 0; k < dim_; ++k)
                m = std::max(m, std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]));
            norms_[static_cast<std::size_t>(color) * n_ + j] = m;
            norms_[static_cast<std::size_t>(j) * n_ + color] = m;
        }
    }

    double current_max() const {
        double best = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) best = std::max(best, norms_[static_cast<std::size_t>(i) * n_ + j]);
        return best;
    }

    int n_;
    int dim_;
    std::vector<double> norms_;
};

RunResult run_multicolor_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    Stopwatch timer;
    RunResult result;
    result.seed = seed;
    const RngSeed base{seed, 0};
    const double c_param = cfg.c_param > 0.0 ? cfg.c_param : default_c_param(cfg.d, cfg.T);
    ColorTree tree(cfg.n, cfg.d, c_param, substream(base, kTreeStream));
    DiscrepancyState disc(cfg.n, cfg.d);
    std::vector<double> total(static_cast<std::size_t>(cfg.d), 0.0);
    PairwiseTracker tracker(cfg.n, cfg.d);
    auto source = make_vector_source(cfg, substream(base, kSourceStream));
    const Recorder recorder(cfg.record_every);
    double running_max = 0.0;
    std::vector<double> empty_dvec;
    while (auto v = source->next(empty_dvec)) {
        const int color = tree.assign_color(v->coords);
        disc.ingest(color, v->coords);
        for (int k = 0; k < cfg.d; ++k) total[static_cast<std::size_t>(k)] += v->coords[static_cast<std::size_t>(k)];
        tracker.update(disc, color);
        const double metric = tracker.current_max();
        if (!std::isfinite(metric)) {
            result.failed = true;
            break;
        }
        running_max = std::max(running_max, metric);
        if (recorder.due(disc.t, cfg.T)) {
            ExperimentRecord rec;
            rec.t = disc.t;
            rec.metric = metric;
            rec.monitors["running_max"] = running_max;
            rec.monitors["clamp_count"] = static_cast<double>(tree.total_clamp_count());
            result.records.push_back(std::move(rec));
        }
        result.final_metric = metric;
    }
    result.max_metric = running_max;
    double conservation = 0.0;
    for (int k = 0; k < cfg.d; ++k) {
        double col = 0.0;
        for (int i = 0; i < cfg.n; ++i) col += disc.color_sums[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        conservation = std::max(conservation, std::abs(col - total[static_cast<std::size_t>(k)]));
    }
    result.monitors["conservation_err"] = conservation;
    result.monitors["clamp_count"] = static_cast<double>(tree.total_clamp_count());
    result.wall_ms = timer.ms();
    return result;
}

RunResult run_envy_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    Stopwatch timer;
    RunResult result;
    result.seed = seed;
    const RngSeed base{seed, 0};
    Rng algo_rng(substream(base, kAlgoStream));
    auto source = make_value_source(cfg, substream(base, kSourceStream));

    const bool is_two_phase = cfg.algorithm == "two_phase";
    const bool is_tree = cfg.algorithm == "discrepancy_tree";
    std::unique_ptr<TwoPhaseState> two_phase;
    std::unique_ptr<AllocationState> plain;
    std::unique_ptr<ColorTree> tree;
    if (is_two_phase) {
        two_phase = std::make_unique<TwoPhaseState>(cfg.n, cfg.T, cfg.log_base);
    } else {
        plain = std::make_unique<AllocationState>(cfg.n, cfg.T);
        if (is_tree) {
            const double c_param = cfg.c_param > 0.0 ? cfg.c_param : default_c_param(cfg.n, cfg.T);
            tree = std::make_unique<ColorTree>(cfg.n, cfg.n, c_param, substream(base, kTreeStream));
        }
    }
    AllocationState& alloc = is_two_phase ? two_phase->alloc : *plain;

    const Recorder recorder(cfg.record_every);
    double running_max = 0.0;
    long long acyclic_violations = 0;
    long long balance_violations = 0;
    while (auto item = source->next()) {
        int recipient = -1;
        if (is_two_phase) {
            recipient = two_phase_step(*two_phase, *item, algo_rng);
        } else if (is_tree) {
            recipient = discrepancy_allocator_step(*tree, alloc, *item);
        } else if (cfg.algorithm == "welfare_max") {
            recipient = welfare_max_step(alloc, *item, algo_rng);
        } else if (cfg.algorithm == "random") {
            recipient = static_cast<int>(algo_rng.below(static_cast<std::uint64_t>(cfg.n)));
            update_allocation(alloc, *item, recipient);
        } else { // astar
            const LRMove move = astar_policy(cfg.T, cfg.K, alloc.t);
            recipient = move == LRMove::L ? 0 : 1;
            update_allocation(alloc, *item, recipient);
        }
        source->observe(recipient);

        const double metric = max_envy(alloc);
        if (!std::isfinite(metric)) {
            result.failed = true;
            break;
        }
        running_max = std::max(running_max, metric);
        if (is_two_phase && alloc.t >= two_phase->T1) {
            if (!is_acyclic(envy_graph_edges(alloc, cfg.c))) ++acyclic_violations;
            if (!phase2_w_ok(alloc.w, two_phase->L)) ++balance_violations;
        }
        if (recorder.due(alloc.t, cfg.T)) {
            ExperimentRecord rec;
            rec.t = alloc.t;
            rec.metric = metric;
            rec.monitors["running_max"] = running_max;
            if (is_two_phase) {
                rec.monitors["phase"] = alloc.t <= two_phase->T1 ? 1.0 : 2.0;
                rec.monitors["acyclic_violations"] = static_cast<double>(acyclic_violations);
                rec.monitors["balance_violations"] = static_cast<double>(balance_violations);
            }
            result.records.push_back(std::move(rec));
        }
        result.final_metric = metric;
    }
    result.max_metric = running_max;
    if (is_two_phase) {
        result.monitors["acyclic_violations"] = static_cast<double>(acyclic_violations);
        result.monitors["balance_violations"] = static_cast<double>(balance_violations);
        result.monitors["phase1_len"] = static_cast<double>(two_phase->T1);
        result.monitors["threshold_L"] = static_cast<double>(two_phase->L);
        result.monitors["degenerate_phase1"] = two_phase->degenerate_phase1 ? 1.0 : 0.0;
    }
    if (tree) result.monitors["clamp_count"] = static_cast<double>(tree->total_clamp_count());
    result.wall_ms = timer.ms();
    return result;
}

RunResult run_one(const ExperimentConfig& cfg, std::uint64_t seed) {
    switch (cfg.mode) {
        case Mode::balance: return run_balance_seed(cfg, seed);
        case Mode::multicolor: return run_multicolor_seed(cfg, seed);
        case Mode::envy:
        case Mode::lowerbound: return run_envy_seed(cfg, seed);
        case Mode::verify: break;
    }
    throw std::logic_error("run_one: verify mode has no per-seed runs");
}

std::vector<std::string> monitor_columns(const ExperimentConfig& cfg) {
    switch (cfg.mode) {
        case Mode::balance:
        case Mode::multicolor: return {"running_max", "clamp_count"};
        case Mode::envy:
        case Mode::lowerbound:
            if (cfg.algorithm == "two_phase")
                return {"running_max", "phase", "acyclic_violations", "balance_violations"};
            return {"running_max"};
        case Mode::verify: break;
    }
    return {};
}

} // namespace

// ---------------------------------------------------------------------------
// Orchestration.

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.mode == Mode::verify)
        throw std::invalid_argument("run_experiment: use run_verify for verify mode");
    Stopwatch timer;
    ExperimentSummary summary;
    summary.config = config;
    summary.runs.resize(config.seeds.size());

    const std::size_t seed_count = config.seeds.size();
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, seed_count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < seed_count; ++i) summary.runs[i] = run_one(config, config.seeds[i]);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto work = [&] {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= seed_count) return;
                try {
                    summary.runs[i] = run_one(config, config.seeds[i]);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned k = 0; k < workers; ++k) pool.emplace_back(work);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::vector<double> finals, maxes;
    long long le_count = 0;
    for (const auto& run : summary.runs) {
        if (run.failed) {
            ++summary.failed_seeds;
            continue;
        }
        finals.push_back(run.final_metric);
        maxes.push_back(run.max_metric);
        if (run.final_metric <= config.c + 1.0 + kEnvyTol) ++le_count;
        const auto get = [&](const char* key) {
            const auto it = run.monitors.find(key);
            return it == run.monitors.end() ? 0.0 : it->second;
        };
        summary.total_acyclic_violations += static_cast<long long>(get("acyclic_violations"));
        summary.total_balance_violations += static_cast<long long>(get("balance_violations"));
        summary.total_clamp += static_cast<long long>(get("clamp_count"));
    }
    summary.median_final = median_of(finals);
    summary.median_max = median_of(maxes);
    summary.fraction_final_le_c1 =
        summary.runs.empty() ? 0.0 : static_cast<double>(le_count) / static_cast<double>(summary.runs.size());
    summary.wall_ms = timer.ms();

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        const auto columns = monitor_columns(config);
        std::vector<TrajectoryRow> rows;
        for (const auto& run : summary.runs)
            for (const auto& rec : run.records) rows.push_back({run.seed, rec});
        write_trajectory_csv((std::filesystem::path(config.out_dir) / "trajectory.csv").string(), columns, rows);
        std::ofstream out(std::filesystem::path(config.out_dir) / "summary.json", std::ios::binary | std::ios::trunc);
        out << summary.to_json_text() << '\n';
    }
    return summary;
}

std::string ExperimentSummary::to_json_text() const {
    json j;
    j["config"] = config_to_json(config);
    json derived;
    derived["c_param_effective"] =
        config.c_param > 0.0 ? config.c_param
                             : default_c_param(config.mode == Mode::balance || config.mode == Mode::multicolor
                                                   ? config.d
                                                   : config.n,
                                               config.T);
    if (config.algorithm == "two_phase" && config.n >= 2 && config.T >= 1) {
        const long long L = phase2_threshold(config.T, config.log_base);
        const long long phase2_len = static_cast<long long>(config.n) * (config.n - 1) / 2 * L;
        derived["threshold_L"] = L;
        derived["phase1_len"] = std::max<long long>(0, config.T - phase2_len);
        derived["degenerate_phase1"] = config.T - phase2_len < 0;
    }
    j["derived"] = derived;
    json seeds_json = json::array();
    for (const auto& run : runs) {
        json r;
        r["seed"] = run.seed;
        r["failed"] = run.failed;
        r["final_metric"] = run.final_metric;
        r["max_metric"] = run.max_metric;
        r["wall_ms"] = run.wall_ms;
        json monitors;
        for (const auto& [k, v] : run.monitors) monitors[k] = v;
        r["monitors"] = monitors;
        seeds_json.push_back(std::move(r));
    }
    j["seeds"] = seeds_json;
    j["aggregate"] = {{"median_final", median_final},
                      {"median_max", median_max},
                      {"fraction_final_le_c_plus_1", fraction_final_le_c1},
                      {"total_acyclic_violations", total_acyclic_violations},
                      {"total_balance_violations", total_balance_violations},
                      {"total_clamp", total_clamp},
                      {"failed_seeds", failed_seeds},
                      {"wall_ms", wall_ms}};
    return j.dump(2);
}

SweepResult sweep(const ExperimentConfig& config, const std::vector<long long>& T_grid) {
    if (T_grid.empty()) throw std::invalid_argument("sweep: empty T grid");
    for (std::size_t i = 1; i < T_grid.size(); ++i)
        if (T_grid[i] <= T_grid[i - 1]) throw std::invalid_argument("sweep: T grid must be ascending");

    SweepResult result;
    result.config = config;
    for (const long long T : T_grid) {
        ExperimentConfig sub = config;
        sub.T = T;
        sub.out_dir.clear();
        sub.sweep_T.clear();
        const ExperimentSummary summary = run_experiment(sub);
        result.rows.push_back({T, summary.median_max, summary.median_final});
    }
    if (result.rows.size() >= 3) {
        std::vector<std::pair<double, double>> points;
        bool positive = true;
        for (const auto& row : result.rows) {
            if (!(row.median_max > 0.0)) positive = false;
            points.emplace_back(static_cast<double>(row.T), row.median_max);
        }
        if (positive) result.fit = scaling_fit(points);
    }

    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        std::ofstream csv(std::filesystem::path(config.out_dir) / "sweep.csv", std::ios::binary | std::ios::trunc);
        csv << "T,median_max,median_final\n";
        for (const auto& row : result.rows)
            csv << row.T << ',' << format_double(row.median_max) << ',' << format_double(row.median_final) << '\n';
        std::ofstream out(std::filesystem::path(config.out_dir) / "sweep.json", std::ios::binary | std::ios::trunc);
        out << result.to_json_text() << '\n';
    }
    return result;
}

std::string SweepResult::to_json_text() const {
    json j;
    j["config"] = config_to_json(config);
    json rows_json = json::array();
    for (const auto& row : rows)
        rows_json.push_back({{"T", row.T}, {"median_max", row.median_max}, {"median_final", row.median_final}});
    j["rows"] = rows_json;
    if (fit) {
        j["fit"] = {{"slope", fit->slope}, {"intercept", fit->intercept}, {"residual", fit->residual}};
    } else {
        j["fit"] = nullptr;
    }
    return j.dump(2);
}

std::vector<ProbeConfig> default_probe_battery() {
    std::vector<ProbeConfig> battery;
    {
        ProbeConfig p;
        p.probe = "concentration";
        p.K = 1000;
        p.L = 10;
        p.c = 2;
        p.dist = DistributionSpec::uniform01();
        p.trials = 100000;
        battery.push_back(p);
    }
    {
        ProbeConfig p;
        p.probe = "halls";
        p.instances = 100000;
        battery.push_back(p);
    }
    for (int n : {2, 3, 5}) {
        ProbeConfig p;
        p.probe = "order_stat";
        p.n = n;
        p.samples = 1000000;
        p.tol = 0.005;
        battery.push_back(p);
    }
    {
        ProbeConfig p;
        p.probe = "orthogonality";
        p.d = 3;
        p.delta = 0.1;
        p.trials = 200000;
        p.floor = 0.01;
        battery.push_back(p);
    }
    {
        ProbeConfig p;
        p.probe = "tree_oracle";
        p.instances = 100;
        p.bound = 3.0;
        battery.push_back(p);
    }
    return battery;
}

std::vector<ProbeReport> run_verify(const ExperimentConfig& config) {
    const std::vector<ProbeConfig> battery = config.probes.empty() ? default_probe_battery() : config.probes;
    const std::uint64_t seed0 = config.seeds.empty() ? 1 : config.seeds[0];
    std::vector<ProbeReport> reports;
    std::uint64_t index = 0;
    for (const auto& p : battery) {
        const RngSeed seed = substream(RngSeed{seed0, kProbeStream}, index++);
        if (p.probe == "concentration") {
            reports.push_back(concentration_probe(p.K, p.L, p.c, p.dist, p.trials, seed));
        } else if (p.probe == "halls") {
            reports.push_back(halls_property_suite(p.instances, seed));
        } else if (p.probe == "order_stat") {
            reports.push_back(order_stat_probe(p.n, p.samples, p.tol, seed));
        } else if (p.probe == "orthogonality") {
            reports.push_back(orthogonality_probe(p.d, p.delta, p.trials, seed, p.floor));
        } else if (p.probe == "tree_oracle") {
            reports.push_back(tree_oracle_probe(p.instances, p.bound, seed));
        } else {
            throw std::invalid_argument("unknown probe: " + p.probe);
        }
    }
    if (!config.out_dir.empty()) {
        std::filesystem::create_directories(config.out_dir);
        write_probe_csv((std::filesystem::path(config.out_dir) / "probes.csv").string(), reports);
        json arr = json::array();
        for (const auto& r : reports)
            arr.push_back({{"name", r.name},
                           {"empirical", r.empirical},
                           {"bound_or_target", r.bound_or_target},
                           {"trials", r.trials},
                           {"passed", r.passed}});
        std::ofstream out(std::filesystem::path(config.out_dir) / "probes.json", std::ios::binary | std::ios::trunc);
        out << arr.dump(2) << '\n';
    }
    return reports;
}

void write_probe_csv(const std::string& path, std::span<const ProbeReport> reports) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "name,empirical,bound_or_target,trials,passed\n";
    for (const auto& r : reports)
        out << r.name << ',' << format_double(r.empirical) << ',' << format_double(r.bound_or_target) << ','
            << r.trials << ',' << (r.passed ? 1 : 0) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace odel
