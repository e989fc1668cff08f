#include "odel/balancers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace odel {

namespace {

void check_input(const BalancerState& state, std::span<const double> v) {
    if (static_cast<int>(v.size()) != state.dim())
        throw std::invalid_argument("balancer: input dimension mismatch");
    if (l2_norm(v) > 1.0 + kNormTol)
        throw std::invalid_argument("balancer: input l2 norm exceeds 1");
}

void apply(BalancerState& state, std::span<const double> v, double weight) {
    for (int k = 0; k < state.dim(); ++k)
        state.d_vec[static_cast<std::size_t>(k)] += weight * v[static_cast<std::size_t>(k)];
    ++state.t;
}

} // namespace

BalancerState::BalancerState(int dim, double c) : c_param(c) {
    if (dim < 1) throw std::invalid_argument("balancer: dimension must be >= 1");
    if (!(c > 0.0)) throw std::invalid_argument("balancer: c_param must be positive");
    d_vec.assign(static_cast<std::size_t>(dim), 0.0);
}

double default_c_param(int dim, long long horizon) {
    return 30.0 * std::log(2.0 * std::max(dim, 2) * static_cast<double>(std::max<long long>(horizon, 1)));
}

int greedy_sign(BalancerState& state, std::span<const double> v) {
    check_input(state, v);
    const double ip = dot(state.d_vec, v);
    const int chi = (std::abs(ip) <= 1e-12) ? +1 : (ip < 0.0 ? +1 : -1);
    apply(state, v, chi);
    return chi;
}

int random_sign(BalancerState& state, std::span<const double> v, Rng& rng) {
    if (static_cast<int>(v.size()) != state.dim())
        throw std::invalid_argument("balancer: input dimension mismatch");
    const int chi = (rng() & 1ULL) ? +1 : -1;
    apply(state, v, chi);
    return chi;
}

int self_balancing_sign(BalancerState& state, std::span<const double> v, Rng& rng) {
    check_input(state, v);
    const double raw = 0.5 - dot(state.d_vec, v) / (2.0 * state.c_param);
    const double p = std::clamp(raw, 0.0, 1.0);
    if (p != raw) ++state.clamp_count;
    const int chi = (rng.uniform01() < p) ? +1 : -1;
    apply(state, v, chi);
    return chi;
}

double weighted_choice(BalancerState& state, std::span<const double> v, double alpha, Rng& rng) {
    if (!(alpha >= 0.5 && alpha <= 2.0 / 3.0))
        throw std::invalid_argument("weighted_choice: alpha outside [1/2, 2/3]");
    check_input(state, v);
    const double raw = alpha * (1.0 - dot(state.d_vec, v) / state.c_param);
    const double p = std::clamp(raw, 0.0, 1.0);
    if (p != raw) ++state.clamp_count;
    const double weight = (rng.uniform01() < p) ? (1.0 - alpha) : -alpha;
    apply(state, v, weight);
    return weight;
}

} // namespace odel
