#include "odel/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace odel {

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double linf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void validate_vector_item(const VectorItem& v, bool require_unit_ball) {
    if (v.coords.empty()) throw std::invalid_argument("vector item: dimension must be >= 1");
    for (double x : v.coords)
        if (!std::isfinite(x)) throw std::invalid_argument("vector item: non-finite coordinate");
    if (require_unit_ball && l2_norm(v.coords) > 1.0 + kNormTol)
        throw std::invalid_argument("vector item: l2 norm exceeds 1");
}

void validate_value_item(const ValueItem& g) {
    if (g.values.size() < 2) throw std::invalid_argument("value item: need at least 2 agents");
    for (double x : g.values)
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("value item: value outside [0, 1]");
}

DiscrepancyState::DiscrepancyState(int n_colors, int dim) : dim_(dim) {
    if (n_colors < 1) throw std::invalid_argument("discrepancy state: need at least one color");
    if (dim < 1) throw std::invalid_argument("discrepancy state: dimension must be >= 1");
    color_sums.assign(static_cast<std::size_t>(n_colors), std::vector<double>(static_cast<std::size_t>(dim), 0.0));
}

void DiscrepancyState::ingest(int color, std::span<const double> v) {
    if (color < 0 || color >= n_colors()) throw std::invalid_argument("discrepancy state: color out of range");
    if (static_cast<int>(v.size()) != dim_) throw std::invalid_argument("discrepancy state: dimension mismatch");
    auto& sum = color_sums[static_cast<std::size_t>(color)];
    for (int k = 0; k < dim_; ++k) sum[static_cast<std::size_t>(k)] += v[static_cast<std::size_t>(k)];
    ++t;
}

double pairwise_max_discrepancy(const DiscrepancyState& state) {
    const int n = state.n_colors();
    if (n < 2 || state.t == 0) return 0.0;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& a = state.color_sums[static_cast<std::size_t>(i)];
            const auto& b = state.color_sums[static_cast<std::size_t>(j)];
            double m = 0.0;
            for (int k = 0; k < state.dim(); ++k)
                m = std::max(m, std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]));
            best = std::max(best, m);
        }
    }
    return best;
}

AllocationState::AllocationState(int n_agents, long long phase1) : phase1_len(phase1), n_(n_agents) {
    if (n_agents < 1) throw std::invalid_argument("allocation state: need at least one agent");
    bundle_values.assign(static_cast<std::size_t>(n_agents) * n_agents, 0.0);
    w.assign(static_cast<std::size_t>(n_agents), 0);
}

double max_envy(const AllocationState& state) {
    const int n = state.n();
    if (n < 2 || state.t == 0) return 0.0;
    double best = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) best = std::max(best, state.envy(i, j));
    return best;
}

void update_allocation(AllocationState& state, const ValueItem& item, int recipient) {
    if (static_cast<int>(item.values.size()) != state.n())
        throw std::invalid_argument("update_allocation: item dimension mismatch");
    if (recipient < 0 || recipient >= state.n())
        throw std::invalid_argument("update_allocation: recipient out of range");
    for (int i = 0; i < state.n(); ++i)
        state.bundle(i, recipient) += item.values[static_cast<std::size_t>(i)];
    ++state.t;
    if (state.t > state.phase1_len) ++state.w[static_cast<std::size_t>(recipient)];
}

} // namespace odel
