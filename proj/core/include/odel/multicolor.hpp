#pragma once

#include <optional>
#include <span>
#include <vector>

#include "odel/balancers.hpp"
#include "odel/core.hpp"
#include "odel/rng.hpp"

namespace odel {

/// Binary tree of weighted balancers routing each arriving vector to one of
/// n colors. An internal node over k leaves runs the weighted chooser with
/// alpha = ceil(k/2)/k; the 1-alpha outcome routes left (toward the
/// ceil(k/2)-leaf subtree), -alpha routes right. Every leaf is reached with
/// routing probability 1/n.
class ColorTree {
public:
    struct Node {
        int leaf_count = 1;
        double alpha = 0.0;
        int left = -1;
        int right = -1;
        int color = -1; // leaf color index, -1 for internal nodes
        std::optional<BalancerState> balancer;
    };

    /// Builds the tree for n >= 1 colors over vectors of dimension dim.
    /// Each internal node owns an independent balancer with the given
    /// c_param and a per-node rng stream split off base_seed by node index.
    ColorTree(int n_colors, int dim, double c_param, RngSeed base_seed);

    /// Routes v from the root to a leaf, updating every balancer on the
    /// path, and returns the leaf's color. Requires ||v||_2 <= 1.
    int assign_color(std::span<const double> v);

    int n_colors() const { return n_colors_; }
    int dim() const { return dim_; }
    const std::vector<Node>& nodes() const { return nodes_; }

    /// Product of edge routing probabilities along the root-to-leaf path of
    /// `color`; equals 1/n for every leaf.
    double leaf_path_product(int color) const;

    /// Sum of clamp_count over all internal balancers.
    long long total_clamp_count() const;

private:
    int build(int k);

    int n_colors_;
    int dim_;
    double c_param_;
    RngSeed base_seed_;
    std::vector<Node> nodes_;
    std::vector<Rng> node_rng_;
    int next_color_ = 0;
    int root_ = -1;
};

ColorTree build_color_tree(int n_colors, int dim, double c_param, RngSeed base_seed);

} // namespace odel
