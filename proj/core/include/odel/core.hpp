#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace odel {

/// Absolute tolerance for envy threshold comparisons: "envy exceeds c"
/// means envy > c + kEnvyTol, so rounding noise never creates graph edges.
inline constexpr double kEnvyTol = 1e-9;

/// Tolerance for unit-ball membership checks on balancer inputs.
inline constexpr double kNormTol = 1e-12;

/// One arriving vector for the discrepancy problems; d >= 1 finite reals.
struct VectorItem {
    std::vector<double> coords;
};

/// One arriving item for envy minimization; values[i] is agent i's value,
/// each in [0, 1], n >= 2.
struct ValueItem {
    std::vector<double> values;
};

double l2_norm(std::span<const double> v);
double linf_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

/// Throws std::invalid_argument unless the item is a valid vector input
/// (finite coordinates, d >= 1). require_unit_ball additionally enforces
/// ||v||_2 <= 1 + kNormTol.
void validate_vector_item(const VectorItem& v, bool require_unit_ball);

/// Throws std::invalid_argument unless n >= 2 and all values lie in [0, 1].
void validate_value_item(const ValueItem& g);

/// Running per-color vector sums for online multicolor discrepancy.
struct DiscrepancyState {
    DiscrepancyState(int n_colors, int dim);

    int n_colors() const { return static_cast<int>(color_sums.size()); }
    int dim() const { return dim_; }

    /// Adds v to the given color's sum and advances the step counter.
    void ingest(int color, std::span<const double> v);

    std::vector<std::vector<double>> color_sums;
    long long t = 0;

private:
    int dim_;
};

/// Max over color pairs (i, j) of ||sum_i - sum_j||_inf.
/// Zero when there are fewer than two colors or nothing was ingested.
double pairwise_max_discrepancy(const DiscrepancyState& state);

/// Allocation bookkeeping for envy minimization. bundle_values is n x n
/// row-major with entry (i, j) = v_i(A_j); w counts phase-2 receipts.
struct AllocationState {
    explicit AllocationState(int n_agents, long long phase1_len = 0);

    int n() const { return n_; }
    double bundle(int i, int j) const { return bundle_values[static_cast<std::size_t>(i) * n_ + j]; }
    double& bundle(int i, int j) { return bundle_values[static_cast<std::size_t>(i) * n_ + j]; }

    /// ENVY_{i,j} = v_i(A_j) - v_i(A_i).
    double envy(int i, int j) const { return bundle(i, j) - bundle(i, i); }

    std::vector<double> bundle_values;
    std::vector<long long> w;
    long long t = 0;
    long long phase1_len = 0;

private:
    int n_;
};

/// Max over ordered pairs i != j of ENVY_{i,j}; zero when n < 2 or t == 0.
double max_envy(const AllocationState& state);

/// Gives the item to `recipient`: adds values into the recipient's column,
/// advances t, and counts a phase-2 receipt when the new t exceeds
/// phase1_len. Rejects dimension mismatches.
void update_allocation(AllocationState& state, const ValueItem& item, int recipient);

/// One recorded metric row of an experiment run.
struct ExperimentRecord {
    long long t = 0;
    double metric = 0.0;
    std::map<std::string, double> monitors;
};

} // namespace odel
