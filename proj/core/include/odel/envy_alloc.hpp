#pragma once

#include <utility>
#include <vector>

#include "odel/core.hpp"
#include "odel/multicolor.hpp"
#include "odel/rng.hpp"

namespace odel {

/// State of the two-phase envy-minimization algorithm: welfare maximization
/// for the first T1 items, then threshold-balanced least-envied allocation
/// for the remaining n(n-1)/2 * L items, where L = ceil(log T * sqrt T).
struct TwoPhaseState {
    /// log_base picks the logarithm used inside L; natural log by default.
    TwoPhaseState(int n_agents, long long horizon, double log_base = 2.718281828459045);

    AllocationState alloc;
    long long T;
    long long T1;
    long long L;
    double log_base;
    /// True when T is so small that T - n(n-1)/2 * L <= 0 and the welfare
    /// phase is skipped entirely.
    bool degenerate_phase1 = false;
};

/// L = ceil(log_base(T) * sqrt(T)).
long long phase2_threshold(long long horizon, double log_base = 2.718281828459045);

/// Allocates the item to an agent of maximal value, ties broken uniformly
/// at random. Returns the recipient.
int welfare_max_step(AllocationState& state, const ValueItem& item, Rng& rng);

/// The smallest prefix S of agents, sorted by phase-2 receipt count w
/// (ties by agent index), such that every agent in S trails every agent
/// outside S by at least L items; all agents when no proper prefix
/// qualifies. Only valid during phase 2.
std::vector<int> active_set(const TwoPhaseState& state);

/// One step of the two-phase algorithm. During phase 1 delegates to
/// welfare_max_step. During phase 2 picks, from the active set S, the agent
/// envied the least (argmin over i in S of max over j in S of ENVY_{j,i}),
/// ties to the lowest agent index; the choice never reads the item's values.
/// Rejects items beyond the declared horizon.
int two_phase_step(TwoPhaseState& state, const ValueItem& item, Rng& rng);

/// Discrepancy-based allocator: routes the value vector, scaled by
/// 1/sqrt(n) to land in the unit ball, through the color tree and gives the
/// item to the returned color's agent.
int discrepancy_allocator_step(ColorTree& tree, AllocationState& state, const ValueItem& item);

/// Directed envy graph at threshold c: edge (i, j) present iff
/// ENVY_{i,j} > c + kEnvyTol.
struct EnvyGraph {
    int n = 0;
    double threshold = 0.0;
    std::vector<std::pair<int, int>> edges;
};

EnvyGraph envy_graph_edges(const AllocationState& state, double c);

/// True iff the graph has no directed cycle (iterative source removal).
bool is_acyclic(const EnvyGraph& g);

} // namespace odel
