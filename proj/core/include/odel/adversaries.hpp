#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odel/core.hpp"
#include "odel/rng.hpp"

namespace odel {

/// Scalar distribution for i.i.d. sources.
struct DistributionSpec {
    enum class Kind { uniform01, uniform_pm1, bernoulli, beta, point_mass, two_point };

    Kind kind = Kind::uniform01;
    double a = 0.0; // beta: first shape
    double b = 0.0; // beta: second shape
    double p = 0.0; // bernoulli / two_point: probability of the first outcome
    double x = 0.0; // point_mass / two_point: first outcome
    double y = 0.0; // two_point: second outcome

    static DistributionSpec uniform01() { return {Kind::uniform01}; }
    static DistributionSpec uniform_pm1() { return {Kind::uniform_pm1}; }
    static DistributionSpec bernoulli(double p);
    static DistributionSpec beta(double a, double b);
    static DistributionSpec point_mass(double x);
    static DistributionSpec two_point(double x, double y, double p);

    /// Throws std::invalid_argument on malformed parameters.
    void validate() const;
    /// True when the support lies within [0, 1] (required for envy sources).
    bool supported_in_01() const;

    std::string describe() const;
};

/// One draw. Beta uses Johnk's rejection sampler, so the draw count consumed
/// from rng is variable but reproducible.
double sample_dist(const DistributionSpec& dist, Rng& rng);

// ---------------------------------------------------------------------------
// Streaming sources. All sources are pure functions of (parameters, seed,
// query history); replaying with the same seed is bit-identical.

class ValueSource {
public:
    virtual ~ValueSource() = default;
    /// Next item, or nullopt when the stream is exhausted.
    virtual std::optional<ValueItem> next() = 0;
    /// Feedback for adaptive sources: the recipient of the previous item.
    virtual void observe(int /*recipient*/) {}
};

class VectorSource {
public:
    virtual ~VectorSource() = default;
    /// Next vector; adaptive sources may inspect the algorithm's current
    /// signed sum, passed as `d_vec`.
    virtual std::optional<VectorItem> next(std::span<const double> d_vec) = 0;
};

enum class VectorScale { raw, inv_sqrt_d };

/// T vectors with i.i.d. U[-1,1] coordinates; inv_sqrt_d multiplies by
/// 1/sqrt(d) so every vector lands in the unit ball.
class IidVectorSource : public VectorSource {
public:
    IidVectorSource(int dim, long long count, VectorScale scale, RngSeed seed);
    std::optional<VectorItem> next(std::span<const double> d_vec) override;

private:
    int dim_;
    long long count_;
    long long emitted_ = 0;
    VectorScale scale_;
    Rng rng_;
};

/// T vectors uniform on the unit sphere (normalized Gaussians).
class SphereVectorSource : public VectorSource {
public:
    SphereVectorSource(int dim, long long count, RngSeed seed);
    std::optional<VectorItem> next(std::span<const double> d_vec) override;

private:
    int dim_;
    long long count_;
    long long emitted_ = 0;
    Rng rng_;
};

/// Unit vector orthogonal to d_vec, via a quarter turn of the axis pair
/// anchored at the largest-magnitude coordinate; e_1 when d_vec = 0.
/// Requires d >= 2.
VectorItem orthogonal_vector(std::span<const double> d_vec);

/// The adaptive orthogonal strategy as a source.
class OrthogonalAdversarySource : public VectorSource {
public:
    OrthogonalAdversarySource(int dim, long long count);
    std::optional<VectorItem> next(std::span<const double> d_vec) override;

private:
    int dim_;
    long long count_;
    long long emitted_ = 0;
};

/// n x T i.i.d. draws from a distribution supported on [0, 1].
class IidValueSource : public ValueSource {
public:
    IidValueSource(int n_agents, long long count, DistributionSpec dist, RngSeed seed);
    std::optional<ValueItem> next() override;

private:
    int n_;
    long long count_;
    long long emitted_ = 0;
    DistributionSpec dist_;
    Rng rng_;
};

// ---------------------------------------------------------------------------
// Adaptive L/R lower-bound machinery.

/// Walk state of the two-agent adaptive adversary. position < 0 encodes
/// state L_d with d = -position, position > 0 encodes R_d, 0 is the origin.
/// v_d = (d+1)^r - d^r is memoized; v_0 = 1 and v_d is strictly decreasing.
struct AdaptiveLRState {
    explicit AdaptiveLRState(double r, int n_agents = 2);

    /// Memoized v_d.
    double v(long long d);

    long long position = 0;
    double r;
    int n_agents;
    std::vector<double> v_table;
};

enum class LRMove { none, L, R };

/// One adversary step: first applies the previous allocation (L moves one
/// state left, R one state right), then emits the item for the new state:
/// (1,1) at the origin, (1, v_d) at L_d, (v_d, 1) at R_d, padded with zeros
/// for agents beyond the first two.
ValueItem adaptive_lr_step(AdaptiveLRState& adv, LRMove last_recipient);

/// The adaptive adversary as a streaming source; agent 0 is L, agent 1 is R.
/// Allocations to other agents leave the walk in place.
class AdaptiveLRSource : public ValueSource {
public:
    AdaptiveLRSource(double r, int n_agents, long long count);
    std::optional<ValueItem> next() override;
    void observe(int recipient) override;
    const AdaptiveLRState& state() const { return state_; }

private:
    AdaptiveLRState state_;
    long long count_;
    long long emitted_ = 0;
    LRMove pending_ = LRMove::none;
};

/// The envy-minimizing allocation policy against the adaptive adversary:
/// K L-steps, then T'-2K steps alternating R, L, then K R-steps.
/// Requires T' even and 0 <= K <= T'/2; step_index is 0-based.
LRMove astar_policy(long long t_prime, long long k, long long step_index);

/// Materializes one instance of the oblivious sampled adversary: simulates
/// the adaptive L/R machine against ceil(log2(1/delta)) uniformly random
/// allocations, then pads with zero-valued items up to length T.
std::vector<ValueItem> oblivious_sampled_instance(long long count, double delta, double r, RngSeed seed);

/// Replays a list of pre-materialized items.
class FixedValueSource : public ValueSource {
public:
    explicit FixedValueSource(std::vector<ValueItem> items);
    std::optional<ValueItem> next() override;

private:
    std::vector<ValueItem> items_;
    std::size_t cursor_ = 0;
};

/// Replays a list of pre-materialized vectors.
class FixedVectorSource : public VectorSource {
public:
    explicit FixedVectorSource(std::vector<VectorItem> items);
    std::optional<VectorItem> next(std::span<const double> d_vec) override;

private:
    std::vector<VectorItem> items_;
    std::size_t cursor_ = 0;
};

} // namespace odel
