#include "odel/adversaries.hpp"

#include <cmath>
#include <stdexcept>

namespace odel {

DistributionSpec DistributionSpec::bernoulli(double p) {
    DistributionSpec d{Kind::bernoulli};
    d.p = p;
    d.validate();
    return d;
}

DistributionSpec DistributionSpec::beta(double a, double b) {
    DistributionSpec d{Kind::beta};
    d.a = a;
    d.b = b;
    d.validate();
    return d;
}

DistributionSpec DistributionSpec::point_mass(double x) {
    DistributionSpec d{Kind::point_mass};
    d.x = x;
    d.validate();
    return d;
}

DistributionSpec DistributionSpec::two_point(double x, double y, double p) {
    DistributionSpec d{Kind::two_point};
    d.x = x;
    d.y = y;
    d.p = p;
    d.validate();
    return d;
}

void DistributionSpec::validate() const {
    switch (kind) {
        case Kind::uniform01:
        case Kind::uniform_pm1:
            return;
        case Kind::bernoulli:
            if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: p outside [0, 1]");
            return;
        case Kind::beta:
            if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("beta: shapes must be positive");
            return;
        case Kind::point_mass:
            if (!std::isfinite(x)) throw std::invalid_argument("point_mass: non-finite value");
            return;
        case Kind::two_point:
            if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("two_point: non-finite value");
            if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("two_point: p outside [0, 1]");
            return;
    }
    throw std::invalid_argument("distribution: unknown kind");
}

bool DistributionSpec::supported_in_01() const {
    switch (kind) {
        case Kind::uniform01:
        case Kind::bernoulli:
        case Kind::beta:
            return true;
        case Kind::uniform_pm1:
            return false;
        case Kind::point_mass:
            return x >= 0.0 && x <= 1.0;
        case Kind::two_point:
            return x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0;
    }
    return false;
}

std::string DistributionSpec::describe() const {
    switch (kind) {
        case Kind::uniform01: return "uniform01";
        case Kind::uniform_pm1: return "uniform_pm1";
        case Kind::bernoulli: return "bernoulli(" + std::to_string(p) + ")";
        case Kind::beta: return "beta(" + std::to_string(a) + "," + std::to_string(b) + ")";
        case Kind::point_mass: return "point_mass(" + std::to_string(x) + ")";
        case Kind::two_point:
            return "two_point(" + std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(p) + ")";
    }
    return "unknown";
}

double sample_dist(const DistributionSpec& dist, Rng& rng) {
    switch (dist.kind) {
        case DistributionSpec::Kind::uniform01:
            return rng.uniform01();
        case DistributionSpec::Kind::uniform_pm1:
            return 2.0 * rng.uniform01() - 1.0;
        case DistributionSpec::Kind::bernoulli:
            return rng.uniform01() < dist.p ? 1.0 : 0.0;
        case DistributionSpec::Kind::beta: {
            // Johnk's sampler; fine for the small shapes used here.
            const double ia = 1.0 / dist.a;
            const double ib = 1.0 / dist.b;
            for (;;) {
                const double u = std::pow(rng.uniform01(), ia);
                const double v = std::pow(rng.uniform01(), ib);
                const double s = u + v;
                if (s > 0.0 && s <= 1.0) return u / s;
            }
        }
        case DistributionSpec::Kind::point_mass:
            return dist.x;
        case DistributionSpec::Kind::two_point:
            return rng.uniform01() < dist.p ? dist.x : dist.y;
    }
    throw std::invalid_argument("distribution: unknown kind");
}

IidVectorSource::IidVectorSource(int dim, long long count, VectorScale scale, RngSeed seed)
    : dim_(dim), count_(count), scale_(scale), rng_(seed) {
    if (dim < 1) throw std::invalid_argument("iid vector source: dimension must be >= 1");
}

std::optional<VectorItem> IidVectorSource::next(std::span<const double>) {
    if (emitted_ >= count_) return std::nullopt;
    ++emitted_;
    VectorItem v;
    v.coords.resize(static_cast<std::size_t>(dim_));
    const double scale = scale_ == VectorScale::inv_sqrt_d ? 1.0 / std::sqrt(static_cast<double>(dim_)) : 1.0;
    for (auto& c : v.coords) c = (2.0 * rng_.uniform01() - 1.0) * scale;
    return v;
}

SphereVectorSource::SphereVectorSource(int dim, long long count, RngSeed seed)
    : dim_(dim), count_(count), rng_(seed) {
    if (dim < 1) throw std::invalid_argument("sphere source: dimension must be >= 1");
}

std::optional<VectorItem> SphereVectorSource::next(std::span<const double>) {
    if (emitted_ >= count_) return std::nullopt;
    ++emitted_;
    VectorItem v;
    v.coords.resize(static_cast<std::size_t>(dim_));
    double norm = 0.0;
    do {
        for (auto& c : v.coords) c = rng_.normal();
        norm = l2_norm(v.coords);
    } while (norm == 0.0);
    for (auto& c : v.coords) c /= norm;
    return v;
}

VectorItem orthogonal_vector(std::span<const double> d_vec) {
    const int d = static_cast<int>(d_vec.size());
    if (d < 2) throw std::invalid_argument("orthogonal adversary: requires d >= 2");
    VectorItem v;
    v.coords.assign(static_cast<std::size_t>(d), 0.0);
    int i = 0;
    for (int k = 1; k < d; ++k)
        if (std::abs(d_vec[static_cast<std::size_t>(k)]) > std::abs(d_vec[static_cast<std::size_t>(i)])) i = k;
    if (d_vec[static_cast<std::size_t>(i)] == 0.0) {
        v.coords[0] = 1.0;
        return v;
    }
    const int j = (i + 1) % d;
    const double di = d_vec[static_cast<std::size_t>(i)];
    const double dj = d_vec[static_cast<std::size_t>(j)];
    const double s = std::hypot(di, dj);
    v.coords[static_cast<std::size_t>(i)] = -dj / s;
    v.coords[static_cast<std::size_t>(j)] = di / s;
    return v;
}

OrthogonalAdversarySource::OrthogonalAdversarySource(int dim, long long count)
    : dim_(dim), count_(count) {
    if (dim < 2) throw std::invalid_argument("orthogonal adversary: requires d >= 2");
}

std::optional<VectorItem> OrthogonalAdversarySource::next(std::span<const double> d_vec) {
    if (emitted_ >= count_) return std::nullopt;
    ++emitted_;
    return orthogonal_vector(d_vec);
}

IidValueSource::IidValueSource(int n_agents, long long count, DistributionSpec dist, RngSeed seed)
    : n_(n_agents), count_(count), dist_(dist), rng_(seed) {
    if (n_agents < 2) throw std::invalid_argument("iid value source: need at least two agents");
    dist.validate();
    if (!dist.supported_in_01())
        throw std::invalid_argument("iid value source: distribution support must lie in [0, 1]");
}

std::optional<ValueItem> IidValueSource::next() {
    if (emitted_ >= count_) return std::nullopt;
    ++emitted_;
    ValueItem g;
    g.values.resize(static_cast<std::size_t>(n_));
    for (auto& x : g.values) x = sample_dist(dist_, rng_);
    return g;
}

AdaptiveLRState::AdaptiveLRState(double r_exp, int agents) : r(r_exp), n_agents(agents) {
    if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("adaptive adversary: r must lie in (0, 1)");
    if (agents < 2) throw std::invalid_argument("adaptive adversary: need at least two agents");
    v_table.push_back(1.0); // v_0 = 1
}

double AdaptiveLRState::v(long long d) {
    if (d < 0) throw std::invalid_argument("adaptive adversary: negative depth");
    while (static_cast<long long>(v_table.size()) <= d) {
        const double k = static_cast<double>(v_table.size());
        v_table.push_back(std::pow(k + 1.0, r) - std::pow(k, r));
    }
    return v_table[static_cast<std::size_t>(d)];
}

ValueItem adaptive_lr_step(AdaptiveLRState& adv, LRMove last_recipient) {
    if (last_recipient == LRMove::L) --adv.position;
    if (last_recipient == LRMove::R) ++adv.position;
    ValueItem g;
    g.values.assign(static_cast<std::size_t>(adv.n_agents), 0.0);
    if (adv.position == 0) {
        g.values[0] = 1.0;
        g.values[1] = 1.0;
    } else if (adv.position < 0) {
        g.values[0] = 1.0;
        g.values[1] = adv.v(-adv.position);
    } else {
        g.values[0] = adv.v(adv.position);
        g.values[1] = 1.0;
    }
    return g;
}

AdaptiveLRSource::AdaptiveLRSource(double r, int n_agents, long long count)
    : state_(r, n_agents), count_(count) {}

std::optional<ValueItem> AdaptiveLRSource::next() {
    if (emitted_ >= count_) return std::nullopt;
    ++emitted_;
    const LRMove move = pending_;
    pending_ = LRMove::none;
    return adaptive_lr_step(state_, move);
}

void AdaptiveLRSource::observe(int recipient) {
    if (recipient == 0) pending_ = LRMove::L;
    else if (recipient == 1) pending_ = LRMove::R;
    else pending_ = LRMove::none;
}

LRMove astar_policy(long long t_prime, long long k, long long step_index) {
    if (t_prime < 2 || t_prime % 2 != 0)
        throw std::invalid_argument("astar policy: T' must be even and >= 2");
    if (k < 0 || k > t_prime / 2)
        throw std::invalid_argument("astar policy: K outside [0, T'/2]");
    if (step_index < 0 || step_index >= t_prime)
        throw std::invalid_argument("astar policy: step index out of range");
    if (step_index < k) return LRMove::L;
    if (step_index < t_prime - k) return ((step_index - k) % 2 == 0) ? LRMove::R : LRMove::L;
    return LRMove::R;
}

std::vector<ValueItem> oblivious_sampled_instance(long long count, double delta, double r, RngSeed seed) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("oblivious sampled adversary: delta must lie in (0, 1)");
    const long long prefix = static_cast<long long>(std::ceil(std::log2(1.0 / delta) - 1e-12));
    const long long m = std::max<long long>(prefix, 1);
    if (m > count)
        throw std::invalid_argument("oblivious sampled adversary: log2(1/delta) exceeds T");
    Rng rng(seed);
    AdaptiveLRState adv(r);
    std::vector<ValueItem> items;
    items.reserve(static_cast<std::size_t>(count));
    LRMove last = LRMove::none;
    for (long long i = 0; i < m; ++i) {
        items.push_back(adaptive_lr_step(adv, last));
        last = (rng() & 1ULL) ? LRMove::R : LRMove::L;
    }
    ValueItem zero;
    zero.values.assign(2, 0.0);
    items.resize(static_cast<std::size_t>(count), zero);
    return items;
}

FixedValueSource::FixedValueSource(std::vector<ValueItem> items) : items_(std::move(items)) {}

std::optional<ValueItem> FixedValueSource::next() {
    if (cursor_ >= items_.size()) return std::nullopt;
    return items_[cursor_++];
}

FixedVectorSource::FixedVectorSource(std::vector<VectorItem> items) : items_(std::move(items)) {}

std::optional<VectorItem> FixedVectorSource::next(std::span<const double>) {
    if (cursor_ >= items_.size()) return std::nullopt;
    return items_[cursor_++];
}

} // namespace odel
