#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "odel/adversaries.hpp"
#include "odel/core.hpp"
#include "odel/rng.hpp"

namespace odel {

/// Outcome of one Monte Carlo or exact probe. `passed` holds exactly when
/// the probe's stated comparison holds; a bound violation within 3 binomial
/// standard errors still passes (it is reported as a warning upstream),
/// beyond 3 is a failure.
struct ProbeReport {
    std::string name;
    double empirical = 0.0;
    double bound_or_target = 0.0;
    long long trials = 0;
    bool passed = false;
};

/// Monte Carlo check of the two-tail-sum concentration bound: estimates
/// Pr[sum of the first K-L draws minus sum of the last L draws < -c] and
/// compares it against 4 * (2eL/K)^(c+1) plus 3 standard errors.
/// Requires L < K / (4e) and c >= 1.
ProbeReport concentration_probe(long long K, long long L, int c,
                                const DistributionSpec& dist, long long trials, RngSeed seed);

/// The Hall-style domination check between two value sequences in [0, 1].
/// condition_holds: for every a_i, #{a_j >= a_i} <= #{b_j >= a_i} + c.
/// conclusion_holds: sum(a) <= sum(b) + c (at 1e-9 absolute tolerance).
/// The condition implies the conclusion.
std::pair<bool, bool> halls_check(std::span<const double> a, std::span<const double> b, double c);

enum class OrderStatCdf { F1, F2 };

/// Closed-form CDFs of the welfare-maximization quantile variables:
/// F1(x) = (n - 1 + x^n) / n, F2(x) = (n-1)/n + (x - x^n/n) / (n-1),
/// for x in [0, 1] and n >= 2.
double order_stat_cdf(OrderStatCdf which, int n, double x);

/// Estimates Pr[|<v, u>| <= delta * ||u||_2 and ||v||_2 in [1/2, 1]] for
/// v uniform on [-1,1]^d and a fixed unit u (the normalized all-ones
/// direction). Passes when the estimate clears `floor` minus 3 standard
/// errors. Requires d >= 3, delta > 0.
ProbeReport orthogonality_probe(int d, double delta, long long trials, RngSeed seed,
                                double floor = 0.01);

/// Tiny rooted tree whose non-root nodes carry the vector set of their
/// parent edge. Nodes are numbered so that parent[u] < u, with node 0 the
/// root (parent[0] = -1 and edge_sets[0] empty).
struct SelectionTree {
    int dim = 0;
    std::vector<int> parent;
    std::vector<std::vector<std::vector<double>>> edge_sets;

    int n_nodes() const { return static_cast<int>(parent.size()); }
};

struct SelectionResult {
    /// choice[u] indexes edge_sets[u]; choice[0] = -1.
    std::vector<int> choice;
    /// min over selections of max over nodes u of ||sum of chosen vectors
    /// on the root-to-u path||_inf.
    double optimum = 0.0;
};

/// Exhaustive selection oracle. Every edge set must lie in the unit ball,
/// contain the origin in its convex hull (verified exactly for sets of at
/// most 4 vectors; larger sets are rejected), and the product of set sizes
/// must not exceed 10^6.
SelectionResult tree_selection_oracle(const SelectionTree& tree);

/// Exact hull membership used by the oracle; exposed for tests.
bool zero_in_hull(const std::vector<std::vector<double>>& set, int dim);

/// True iff at every recorded step the sorted phase-2 receipt counts have
/// adjacent gaps at most L and maximum at most (n-1) * L.
bool phase2_balance_check(std::span<const std::vector<long long>> w_history, long long L);

/// Single-step version of the balance check.
bool phase2_w_ok(std::span<const long long> w, long long L);

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // RMS of log-residuals
};

/// Least-squares fit of log(metric) against log(T). Requires at least 3
/// points, all coordinates positive.
ScalingFit scaling_fit(std::span<const std::pair<double, double>> points);

// ---------------------------------------------------------------------------
// Probe batteries shared by the CLI `verify` mode and the acceptance suite.

/// Random Hall-check instances (mixed generators, including tie-heavy and
/// identical-sequence cases); empirical = number of instances where the
/// condition held but the conclusion failed. Passes iff zero.
ProbeReport halls_property_suite(long long instances, RngSeed seed);

/// Simulates `samples` welfare-maximization quantile draws for n agents and
/// compares the empirical CDFs of the two receipt-indicator variables
/// against the closed forms F1/F2; empirical = sup deviation over both.
/// Passes iff it is at most tol.
ProbeReport order_stat_probe(int n, long long samples, double tol, RngSeed seed);

/// Random tiny selection trees (depth <= 4, edge sets of size <= 3, d = 2,
/// origin in every hull); empirical = largest exhaustive optimum seen.
/// Passes iff every optimum is at most `bound` and the returned selection
/// re-evaluates to the reported optimum exactly.
ProbeReport tree_oracle_probe(long long instances, double bound, RngSeed seed);

/// Re-evaluates a selection: max over nodes of the inf-norm of the chosen
/// root-to-node sums.
double evaluate_selection(const SelectionTree& tree, std::span<const int> choice);

} // namespace odel
