#include "odel/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace odel {

namespace {

double binomial_se(double p_hat, long long trials) {
    return std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / static_cast<double>(trials));
}

} // namespace

ProbeReport concentration_probe(long long K, long long L, int c,
                                const DistributionSpec& dist, long long trials, RngSeed seed) {
    if (K < 1 || L < 1 || trials < 1) throw std::invalid_argument("concentration probe: K, L, trials must be >= 1");
    if (c < 1) throw std::invalid_argument("concentration probe: c must be >= 1");
    if (!(static_cast<double>(L) < static_cast<double>(K) / (4.0 * std::exp(1.0))))
        throw std::invalid_argument("concentration probe: requires L < K / (4e)");
    dist.validate();
    if (!dist.supported_in_01())
        throw std::invalid_argument("concentration probe: distribution support must lie in [0, 1]");

    Rng rng(seed);
    long long hits = 0;
    for (long long trial = 0; trial < trials; ++trial) {
        double head = 0.0;
        for (long long i = 0; i < K - L; ++i) head += sample_dist(dist, rng);
        double tail = 0.0;
        for (long long i = 0; i < L; ++i) tail += sample_dist(dist, rng);
        if (head - tail < -static_cast<double>(c)) ++hits;
    }
    ProbeReport report;
    report.name = "concentration(K=" + std::to_string(K) + ",L=" + std::to_string(L) +
                  ",c=" + std::to_string(c) + "," + dist.describe() + ")";
    report.trials = trials;
    report.empirical = static_cast<double>(hits) / static_cast<double>(trials);
    report.bound_or_target =
        4.0 * std::pow(2.0 * std::exp(1.0) * static_cast<double>(L) / static_cast<double>(K), c + 1);
    report.passed = report.empirical <= report.bound_or_target + 3.0 * binomial_se(report.empirical, trials);
    return report;
}

std::pair<bool, bool> halls_check(std::span<const double> a, std::span<const double> b, double c) {
    for (double x : a)
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("halls_check: a value outside [0, 1]");
    for (double x : b)
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("halls_check: b value outside [0, 1]");

    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    bool condition = true;
    for (double x : a) {
        const auto count_a = sa.end() - std::lower_bound(sa.begin(), sa.end(), x);
        const auto count_b = sb.end() - std::lower_bound(sb.begin(), sb.end(), x);
        if (static_cast<double>(count_a) > static_cast<double>(count_b) + c) {
            condition = false;
            break;
        }
    }
    double sum_a = 0.0, sum_b = 0.0;
    for (double x : a) sum_a += x;
    for (double x : b) sum_b += x;
    const bool conclusion = sum_a <= sum_b + c + kEnvyTol;
    return {condition, conclusion};
}

double order_stat_cdf(OrderStatCdf which, int n, double x) {
    if (n < 2) throw std::invalid_argument("order_stat_cdf: n must be >= 2");
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("order_stat_cdf: x outside [0, 1]");
    const double dn = static_cast<double>(n);
    const double xn = std::pow(x, dn);
    if (which == OrderStatCdf::F1) return (dn - 1.0 + xn) / dn;
    return (dn - 1.0) / dn + (x - xn / dn) / (dn - 1.0);
}

ProbeReport orthogonality_probe(int d, double delta, long long trials, RngSeed seed, double floor) {
    if (d < 3) throw std::invalid_argument("orthogonality probe: requires d >= 3");
    if (!(delta > 0.0)) throw std::invalid_argument("orthogonality probe: delta must be positive");
    if (trials < 1) throw std::invalid_argument("orthogonality probe: trials must be >= 1");

    // Fixed reference direction: normalized all-ones. ||u||_2 = 1, so the
    // angular condition is |<v, u>| <= delta.
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    Rng rng(seed);
    long long hits = 0;
    std::vector<double> v(static_cast<std::size_t>(d));
    for (long long trial = 0; trial < trials; ++trial) {
        double ip = 0.0;
        double norm_sq = 0.0;
        for (auto& x : v) {
            x = 2.0 * rng.uniform01() - 1.0;
            ip += x * inv_sqrt_d;
            norm_sq += x * x;
        }
        if (std::abs(ip) <= delta && norm_sq >= 0.25 && norm_sq <= 1.0) ++hits;
    }
    ProbeReport report;
    report.name = "orthogonality(d=" + std::to_string(d) + ",delta=" + std::to_string(delta) + ")";
    report.trials = trials;
    report.empirical = static_cast<double>(hits) / static_cast<double>(trials);
    report.bound_or_target = floor;
    report.passed = report.empirical >= floor - 3.0 * binomial_se(report.empirical, trials);
    return report;
}

namespace {

// Solves min ||A x - rhs|| for the (dim+1) x m system stacking the vectors
// over the convex-combination row, via normal equations. Returns false when
// the subset is affinely dependent (singular normal matrix).
bool barycentric_feasible(const std::vector<const std::vector<double>*>& pts, int dim) {
    const int m = static_cast<int>(pts.size());
    double ata[4][4] = {};
    double atb[4] = {};
    // A has rows: dim coordinate rows (rhs 0) and one all-ones row (rhs 1).
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            double s = 1.0; // ones row contributes 1*1
            for (int k = 0; k < dim; ++k)
                s += (*pts[static_cast<std::size_t>(i)])[static_cast<std::size_t>(k)] *
                     (*pts[static_cast<std::size_t>(j)])[static_cast<std::size_t>(k)];
            ata[i][j] = s;
        }
        atb[i] = 1.0; // rhs is zero except the ones row
    }
    // Gaussian elimination with partial pivoting on the m x m system.
    int perm[4] = {0, 1, 2, 3};
    double x[4] = {};
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int row = col + 1; row < m; ++row)
            if (std::abs(ata[perm[row]][col]) > std::abs(ata[perm[pivot]][col])) pivot = row;
        std::swap(perm[col], perm[pivot]);
        const double diag = ata[perm[col]][col];
        if (std::abs(diag) < 1e-14) return false;
        for (int row = col + 1; row < m; ++row) {
            const double f = ata[perm[row]][col] / diag;
            for (int k = col; k < m; ++k) ata[perm[row]][k] -= f * ata[perm[col]][k];
            atb[perm[row]] -= f * atb[perm[col]];
        }
    }
    for (int col = m - 1; col >= 0; --col) {
        double s = atb[perm[col]];
        for (int k = col + 1; k < m; ++k) s -= ata[perm[col]][k] * x[k];
        x[col] = s / ata[perm[col]][col];
    }
    // Verify the actual system: nonnegative weights, unit sum, zero vector sum.
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        if (x[i] < -1e-9) return false;
        sum += x[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) return false;
    for (int k = 0; k < dim; ++k) {
        double coord = 0.0;
        for (int i = 0; i < m; ++i)
            coord += x[i] * (*pts[static_cast<std::size_t>(i)])[static_cast<std::size_t>(k)];
        if (std::abs(coord) > 1e-9) return false;
    }
    return true;
}

} // namespace

bool zero_in_hull(const std::vector<std::vector<double>>& set, int dim) {
    const int m = static_cast<int>(set.size());
    if (m == 0 || m > 4) throw std::invalid_argument("zero_in_hull: set size must be in [1, 4]");
    for (const auto& v : set)
        if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("zero_in_hull: dimension mismatch");
    // By Caratheodory some affinely independent subset witnesses membership,
    // so trying every subset with a nonsingular solve is exact.
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<const std::vector<double>*> pts;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) pts.push_back(&set[static_cast<std::size_t>(i)]);
        if (barycentric_feasible(pts, dim)) return true;
    }
    return false;
}

SelectionResult tree_selection_oracle(const SelectionTree& tree) {
    const int n = tree.n_nodes();
    if (n < 1 || tree.parent.empty() || tree.parent[0] != -1)
        throw std::invalid_argument("selection tree: node 0 must be the root");
    if (static_cast<int>(tree.edge_sets.size()) != n)
        throw std::invalid_argument("selection tree: edge_sets size mismatch");
    if (tree.dim < 1) throw std::invalid_argument("selection tree: dimension must be >= 1");

    double combinations = 1.0;
    for (int u = 1; u < n; ++u) {
        if (tree.parent[static_cast<std::size_t>(u)] < 0 || tree.parent[static_cast<std::size_t>(u)] >= u)
            throw std::invalid_argument("selection tree: parents must precede children");
        const auto& set = tree.edge_sets[static_cast<std::size_t>(u)];
        if (set.empty()) throw std::invalid_argument("selection tree: empty edge set");
        if (set.size() > 4)
            throw std::invalid_argument("selection tree: edge sets larger than 4 are rejected");
        for (const auto& v : set) {
            if (static_cast<int>(v.size()) != tree.dim)
                throw std::invalid_argument("selection tree: vector dimension mismatch");
            if (l2_norm(v) > 1.0 + kNormTol)
                throw std::invalid_argument("selection tree: vector outside the unit ball");
        }
        if (!zero_in_hull(set, tree.dim))
            throw std::invalid_argument("selection tree: origin not in an edge set's convex hull");
        combinations *= static_cast<double>(set.size());
        if (combinations > 1e6)
            throw std::invalid_argument("selection tree: selection count exceeds 10^6");
    }

    SelectionResult best;
    best.choice.assign(static_cast<std::size_t>(n), -1);
    if (n == 1) {
        best.optimum = 0.0;
        return best;
    }

    std::vector<int> digits(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(tree.dim), 0.0));
    bool have_best = false;
    for (;;) {
        double cost = 0.0;
        for (int u = 1; u < n; ++u) {
            const auto& parent_sum = sums[static_cast<std::size_t>(tree.parent[static_cast<std::size_t>(u)])];
            const auto& pick =
                tree.edge_sets[static_cast<std::size_t>(u)][static_cast<std::size_t>(digits[static_cast<std::size_t>(u)])];
            auto& sum = sums[static_cast<std::size_t>(u)];
            double node_norm = 0.0;
            for (int k = 0; k < tree.dim; ++k) {
                sum[static_cast<std::size_t>(k)] = parent_sum[static_cast<std::size_t>(k)] + pick[static_cast<std::size_t>(k)];
                node_norm = std::max(node_norm, std::abs(sum[static_cast<std::size_t>(k)]));
            }
            cost = std::max(cost, node_norm);
        }
        if (!have_best || cost < best.optimum) {
            have_best = true;
            best.optimum = cost;
            for (int u = 1; u < n; ++u) best.choice[static_cast<std::size_t>(u)] = digits[static_cast<std::size_t>(u)];
        }
        // Advance the mixed-radix counter over nodes 1..n-1.
        int u = 1;
        while (u < n) {
            if (++digits[static_cast<std::size_t>(u)] <
                static_cast<int>(tree.edge_sets[static_cast<std::size_t>(u)].size()))
                break;
            digits[static_cast<std::size_t>(u)] = 0;
            ++u;
        }
        if (u == n) break;
    }
    return best;
}

bool phase2_w_ok(std::span<const long long> w, long long L) {
    std::vector<long long> sorted(w.begin(), w.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
        if (sorted[i + 1] - sorted[i] > L) return false;
    const long long n = static_cast<long long>(w.size());
    return sorted.empty() || sorted.back() <= (n - 1) * L;
}

bool phase2_balance_check(std::span<const std::vector<long long>> w_history, long long L) {
    for (const auto& w : w_history)
        if (!phase2_w_ok(w, L)) return false;
    return true;
}

double evaluate_selection(const SelectionTree& tree, std::span<const int> choice) {
    const int n = tree.n_nodes();
    if (static_cast<int>(choice.size()) != n)
        throw std::invalid_argument("evaluate_selection: choice size mismatch");
    std::vector<std::vector<double>> sums(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(tree.dim), 0.0));
    double cost = 0.0;
    for (int u = 1; u < n; ++u) {
        const auto& parent_sum = sums[static_cast<std::size_t>(tree.parent[static_cast<std::size_t>(u)])];
        const auto& pick =
            tree.edge_sets[static_cast<std::size_t>(u)][static_cast<std::size_t>(choice[static_cast<std::size_t>(u)])];
        auto& sum = sums[static_cast<std::size_t>(u)];
        double node_norm = 0.0;
        for (int k = 0; k < tree.dim; ++k) {
            sum[static_cast<std::size_t>(k)] = parent_sum[static_cast<std::size_t>(k)] + pick[static_cast<std::size_t>(k)];
            node_norm = std::max(node_norm, std::abs(sum[static_cast<std::size_t>(k)]));
        }
        cost = std::max(cost, node_norm);
    }
    return cost;
}

ProbeReport halls_property_suite(long long instances, RngSeed seed) {
    Rng rng(seed);
    long long violations = 0;
    long long condition_held = 0;
    const double grid[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (long long it = 0; it < instances; ++it) {
        const std::size_t k = static_cast<std::size_t>(rng.below(26));
        const std::size_t l = static_cast<std::size_t>(rng.below(26));
        std::vector<double> a(k), b(l);
        const auto gen = rng.below(4);
        if (gen == 0) {
            for (auto& x : a) x = rng.uniform01();
            for (auto& x : b) x = rng.uniform01();
        } else if (gen == 1) {
            // b shares a prefix with a; exercises exact ties in the counts
            for (auto& x : a) x = rng.uniform01();
            b = a;
            b.resize(l, 0.0);
            for (std::size_t i = a.size(); i < b.size(); ++i) b[i] = rng.uniform01();
        } else if (gen == 2) {
            for (auto& x : a) x = grid[rng.below(5)];
            for (auto& x : b) x = grid[rng.below(5)];
        } else {
            // b dominates a pointwise where lengths overlap
            for (auto& x : a) x = rng.uniform01();
            b.resize(l);
            for (std::size_t i = 0; i < b.size(); ++i) {
                const double base = i < a.size() ? a[i] : 0.0;
                b[i] = base + (1.0 - base) * rng.uniform01();
            }
        }
        const double c = (rng.below(2) == 0) ? static_cast<double>(rng.below(4)) : 3.0 * rng.uniform01();
        const auto [condition, conclusion] = halls_check(a, b, c);
        if (condition) {
            ++condition_held;
            if (!conclusion) ++violations;
        }
    }
    ProbeReport report;
    report.name = "halls_property(instances=" + std::to_string(instances) +
                  ",condition_held=" + std::to_string(condition_held) + ")";
    report.trials = instances;
    report.empirical = static_cast<double>(violations);
    report.bound_or_target = 0.0;
    report.passed = violations == 0;
    return report;
}

namespace {

// Sup deviation between the closed-form CDF and the empirical CDF of
// samples supported on {-1} union [0, 1].
double sup_cdf_deviation(OrderStatCdf which, int n, long long neg_count,
                         std::vector<double>& positive) {
    std::sort(positive.begin(), positive.end());
    const double total = static_cast<double>(neg_count) + static_cast<double>(positive.size());
    const double atom = static_cast<double>(neg_count) / total;
    double dev = std::abs(atom - order_stat_cdf(which, n, 0.0));
    for (std::size_t i = 0; i < positive.size(); ++i) {
        const double f = order_stat_cdf(which, n, positive[i]);
        const double below = (static_cast<double>(neg_count) + static_cast<double>(i)) / total;
        const double at = (static_cast<double>(neg_count) + static_cast<double>(i) + 1.0) / total;
        dev = std::max(dev, std::max(f - below, at - f));
    }
    return dev;
}

} // namespace

ProbeReport order_stat_probe(int n, long long samples, double tol, RngSeed seed) {
    if (n < 2) throw std::invalid_argument("order_stat_probe: n must be >= 2");
    Rng rng(seed);
    std::vector<double> z1, z2;
    long long neg1 = 0, neg2 = 0;
    std::vector<double> q(static_cast<std::size_t>(n));
    for (long long s = 0; s < samples; ++s) {
        int argmax = 0;
        for (int i = 0; i < n; ++i) {
            q[static_cast<std::size_t>(i)] = rng.uniform01();
            if (q[static_cast<std::size_t>(i)] > q[static_cast<std::size_t>(argmax)]) argmax = i;
        }
        if (argmax == 0) z1.push_back(q[0]); else ++neg1;
        if (argmax == 1) z2.push_back(q[0]); else ++neg2;
    }
    const double d1 = sup_cdf_deviation(OrderStatCdf::F1, n, neg1, z1);
    const double d2 = sup_cdf_deviation(OrderStatCdf::F2, n, neg2, z2);
    ProbeReport report;
    report.name = "order_stat_cdf(n=" + std::to_string(n) + ")";
    report.trials = samples;
    report.empirical = std::max(d1, d2);
    report.bound_or_target = tol;
    report.passed = report.empirical <= tol;
    return report;
}

namespace {

std::vector<double> random_disk_vector(Rng& rng, double max_norm) {
    const double angle = 2.0 * 3.14159265358979323846 * rng.uniform01();
    const double radius = max_norm * std::sqrt(rng.uniform01());
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

SelectionTree random_selection_tree(Rng& rng) {
    SelectionTree tree;
    tree.dim = 2;
    tree.parent.push_back(-1);
    tree.edge_sets.emplace_back();
    std::vector<int> depth{0};
    const int edges = 1 + static_cast<int>(rng.below(10));
    for (int e = 0; e < edges; ++e) {
        std::vector<int> eligible;
        for (int u = 0; u < static_cast<int>(depth.size()); ++u)
            if (depth[static_cast<std::size_t>(u)] < 4) eligible.push_back(u);
        if (eligible.empty()) break;
        const int parent = eligible[static_cast<std::size_t>(rng.below(eligible.size()))];
        tree.parent.push_back(parent);
        depth.push_back(depth[static_cast<std::size_t>(parent)] + 1);
        std::vector<std::vector<double>> set;
        const auto type = rng.below(3);
        if (type == 0) {
            set.push_back({0.0, 0.0});
        } else if (type == 1) {
            auto v = random_disk_vector(rng, 1.0);
            set.push_back(v);
            set.push_back({-v[0], -v[1]});
        } else {
            for (;;) {
                auto v1 = random_disk_vector(rng, 1.0);
                auto v2 = random_disk_vector(rng, 1.0);
                const std::vector<double> v3{-(v1[0] + v2[0]), -(v1[1] + v2[1])};
                if (l2_norm(v3) <= 1.0) {
                    set.push_back(v1);
                    set.push_back(v2);
                    set.push_back(v3);
                    break;
                }
            }
        }
        tree.edge_sets.push_back(std::move(set));
    }
    return tree;
}

} // namespace

ProbeReport tree_oracle_probe(long long instances, double bound, RngSeed seed) {
    Rng rng(seed);
    double worst = 0.0;
    bool all_ok = true;
    for (long long it = 0; it < instances; ++it) {
        const SelectionTree tree = random_selection_tree(rng);
        const SelectionResult result = tree_selection_oracle(tree);
        worst = std::max(worst, result.optimum);
        if (result.optimum > bound) all_ok = false;
        if (evaluate_selection(tree, result.choice) != result.optimum) all_ok = false;
    }
    ProbeReport report;
    report.name = "tree_selection_oracle(instances=" + std::to_string(instances) + ")";
    report.trials = instances;
    report.empirical = worst;
    report.bound_or_target = bound;
    report.passed = all_ok && worst <= bound;
    return report;
}

ScalingFit scaling_fit(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw std::invalid_argument("scaling_fit: need at least 3 points");
    for (const auto& [t, m] : points)
        if (!(t > 0.0 && m > 0.0)) throw std::invalid_argument("scaling_fit: inputs must be positive");
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (const auto& [t, m] : points) {
        const double x = std::log(t);
        const double y = std::log(m);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12) throw std::invalid_argument("scaling_fit: degenerate abscissae");
    ScalingFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double rss = 0.0;
    for (const auto& [t, m] : points) {
        const double e = std::log(m) - (fit.intercept + fit.slope * std::log(t));
        rss += e * e;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

} // namespace odel
