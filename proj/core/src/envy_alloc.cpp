#include "odel/envy_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace odel {

long long phase2_threshold(long long horizon, double log_base) {
    if (horizon < 1) throw std::invalid_argument("phase2_threshold: horizon must be >= 1");
    if (!(log_base > 1.0)) throw std::invalid_argument("phase2_threshold: log base must exceed 1");
    const double t = static_cast<double>(horizon);
    return static_cast<long long>(std::ceil(std::log(t) / std::log(log_base) * std::sqrt(t)));
}

TwoPhaseState::TwoPhaseState(int n_agents, long long horizon, double base)
    : alloc(n_agents), T(horizon), log_base(base) {
    if (n_agents < 2) throw std::invalid_argument("two-phase: need at least two agents");
    L = phase2_threshold(horizon, base);
    const long long phase2_len = static_cast<long long>(n_agents) * (n_agents - 1) / 2 * L;
    T1 = T - phase2_len;
    if (T1 < 0) {
        T1 = 0;
        degenerate_phase1 = true;
    }
    alloc.phase1_len = T1;
}

int welfare_max_step(AllocationState& state, const ValueItem& item, Rng& rng) {
    if (static_cast<int>(item.values.size()) != state.n())
        throw std::invalid_argument("welfare_max_step: item dimension mismatch");
    const double best = *std::max_element(item.values.begin(), item.values.end());
    std::vector<int> argmax;
    argmax.reserve(2);
    for (int i = 0; i < state.n(); ++i)
        if (item.values[static_cast<std::size_t>(i)] == best) argmax.push_back(i);
    const int recipient = argmax.size() == 1
                              ? argmax[0]
                              : argmax[static_cast<std::size_t>(rng.below(argmax.size()))];
    update_allocation(state, item, recipient);
    return recipient;
}

std::vector<int> active_set(const TwoPhaseState& state) {
    if (state.alloc.t < state.T1)
        throw std::logic_error("active_set: only defined during phase 2");
    const int n = state.alloc.n();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto wa = state.alloc.w[static_cast<std::size_t>(a)];
        const auto wb = state.alloc.w[static_cast<std::size_t>(b)];
        return wa != wb ? wa < wb : a < b;
    });
    for (int j = 0; j + 1 < n; ++j) {
        const auto boundary = state.alloc.w[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
        const auto next = state.alloc.w[static_cast<std::size_t>(order[static_cast<std::size_t>(j + 1)])];
        if (boundary <= next - state.L) {
            order.resize(static_cast<std::size_t>(j + 1));
            return order;
        }
    }
    return order;
}

int two_phase_step(TwoPhaseState& state, const ValueItem& item, Rng& rng) {
    if (state.alloc.t >= state.T)
        throw std::invalid_argument("two_phase_step: stream longer than declared horizon");
    if (state.alloc.t < state.T1) return welfare_max_step(state.alloc, item, rng);

    // Phase 2: the recipient is fixed before the item's values are touched.
    const std::vector<int> active = active_set(state);
    int recipient = -1;
    double least = 0.0;
    for (int i : active) {
        double envied = 0.0; // includes j == i, whose envy is 0
        for (int j : active) envied = std::max(envied, state.alloc.envy(j, i));
        if (recipient < 0 || envied < least ||
            (envied == least && i < recipient)) {
            recipient = i;
            least = envied;
        }
    }
    update_allocation(state.alloc, item, recipient);
    return recipient;
}

int discrepancy_allocator_step(ColorTree& tree, AllocationState& state, const ValueItem& item) {
    if (tree.n_colors() != state.n())
        throw std::invalid_argument("discrepancy allocator: tree leaves must match agent count");
    if (static_cast<int>(item.values.size()) != state.n())
        throw std::invalid_argument("discrepancy allocator: item dimension mismatch");
    const double scale = 1.0 / std::sqrt(static_cast<double>(state.n()));
    std::vector<double> scaled(item.values.size());
    for (std::size_t k = 0; k < scaled.size(); ++k) scaled[k] = item.values[k] * scale;
    const int recipient = tree.assign_color(scaled);
    update_allocation(state, item, recipient);
    return recipient;
}

EnvyGraph envy_graph_edges(const AllocationState& state, double c) {
    EnvyGraph g;
    g.n = state.n();
    g.threshold = c;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            if (i != j && state.envy(i, j) > c + kEnvyTol) g.edges.emplace_back(i, j);
    return g;
}

bool is_acyclic(const EnvyGraph& g) {
    std::vector<int> indegree(static_cast<std::size_t>(g.n), 0);
    std::vector<std::vector<int>> out(static_cast<std::size_t>(g.n));
    for (const auto& [i, j] : g.edges) {
        out[static_cast<std::size_t>(i)].push_back(j);
        ++indegree[static_cast<std::size_t>(j)];
    }
    std::vector<int> sources;
    for (int i = 0; i < g.n; ++i)
        if (indegree[static_cast<std::size_t>(i)] == 0) sources.push_back(i);
    int removed = 0;
    while (!sources.empty()) {
        const int u = sources.back();
        sources.pop_back();
        ++removed;
        for (int v : out[static_cast<std::size_t>(u)])
            if (--indegree[static_cast<std::size_t>(v)] == 0) sources.push_back(v);
    }
    return removed == g.n;
}

} // namespace odel
