#pragma once

#include <span>
#include <vector>

#include "odel/core.hpp"
#include "odel/rng.hpp"

namespace odel {

/// State of one two-way online balancer: the running signed (or weighted)
/// sum, a step counter, the probability-slope scale c, and a diagnostics
/// counter for how often the sign probability had to be clamped into [0, 1].
struct BalancerState {
    explicit BalancerState(int dim, double c_param);

    int dim() const { return static_cast<int>(d_vec.size()); }

    std::vector<double> d_vec;
    long long t = 0;
    double c_param;
    long long clamp_count = 0;
};

/// Default probability-slope scale, 30 * ln(2 * max(d, 2) * T).
double default_c_param(int dim, long long horizon);

/// Deterministic greedy signing: picks the sign minimizing ||d + chi*v||_2,
/// i.e. chi = -sign(<d, v>), breaking the tie <d, v> ~ 0 as +1.
/// Requires ||v||_2 <= 1. Updates the state with chi*v.
int greedy_sign(BalancerState& state, std::span<const double> v);

/// Uniform random sign, state updated with chi*v.
int random_sign(BalancerState& state, std::span<const double> v, Rng& rng);

/// Self-balancing random walk: +1 with probability
/// clamp(1/2 - <d, v> / (2c), 0, 1). Requires ||v||_2 <= 1.
/// clamp_count is incremented whenever the clamp was active.
int self_balancing_sign(BalancerState& state, std::span<const double> v, Rng& rng);

/// Weighted two-option chooser: returns 1-alpha with probability
/// clamp(alpha * (1 - <d, v> / c), 0, 1), else -alpha, and adds weight*v to
/// the state. The unclamped mean increment is -(alpha/c) * <d, v> * v: zero
/// at d = 0, drifting against d otherwise. Requires alpha in [1/2, 2/3]
/// and ||v||_2 <= 1.
double weighted_choice(BalancerState& state, std::span<const double> v, double alpha, Rng& rng);

} // namespace odel
