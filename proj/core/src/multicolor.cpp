#include "odel/multicolor.hpp"

#include <stdexcept>

namespace odel {

ColorTree::ColorTree(int n_colors, int dim, double c_param, RngSeed base_seed)
    : n_colors_(n_colors), dim_(dim), c_param_(c_param), base_seed_(base_seed) {
    if (n_colors < 1) throw std::invalid_argument("color tree: need at least one color");
    if (dim < 1) throw std::invalid_argument("color tree: dimension must be >= 1");
    root_ = build(n_colors);
    node_rng_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        node_rng_.emplace_back(substream(base_seed_, static_cast<std::uint64_t>(i)));
}

int ColorTree::build(int k) {
    const int idx = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (k == 1) {
        nodes_[static_cast<std::size_t>(idx)].color = next_color_++;
        return idx;
    }
    const int half_up = (k + 1) / 2;
    Node node;
    node.leaf_count = k;
    node.alpha = static_cast<double>(half_up) / static_cast<double>(k);
    node.balancer.emplace(dim_, c_param_);
    nodes_[static_cast<std::size_t>(idx)] = std::move(node);
    const int left = build(half_up);
    const int right = build(k - half_up);
    nodes_[static_cast<std::size_t>(idx)].left = left;
    nodes_[static_cast<std::size_t>(idx)].right = right;
    return idx;
}

int ColorTree::assign_color(std::span<const double> v) {
    if (static_cast<int>(v.size()) != dim_)
        throw std::invalid_argument("color tree: input dimension mismatch");
    if (l2_norm(v) > 1.0 + kNormTol)
        throw std::invalid_argument("color tree: input l2 norm exceeds 1");
    int at = root_;
    while (nodes_[static_cast<std::size_t>(at)].color < 0) {
        auto& node = nodes_[static_cast<std::size_t>(at)];
        const double w = weighted_choice(*node.balancer, v, node.alpha, node_rng_[static_cast<std::size_t>(at)]);
        at = (w > 0.0) ? node.left : node.right;
    }
    return nodes_[static_cast<std::size_t>(at)].color;
}

double ColorTree::leaf_path_product(int color) const {
    if (color < 0 || color >= n_colors_) throw std::invalid_argument("color tree: color out of range");
    // Walk down from the root; the target leaf is in the left subtree exactly
    // when color falls among its first ceil(k/2) colors (leaves are numbered
    // left to right).
    double product = 1.0;
    int at = root_;
    int lo = 0;
    while (nodes_[static_cast<std::size_t>(at)].color < 0) {
        const auto& node = nodes_[static_cast<std::size_t>(at)];
        const int left_leaves = nodes_[static_cast<std::size_t>(node.left)].leaf_count;
        if (color < lo + left_leaves) {
            product *= node.alpha;
            at = node.left;
        } else {
            product *= 1.0 - node.alpha;
            lo += left_leaves;
            at = node.right;
        }
    }
    return product;
}

long long ColorTree::total_clamp_count() const {
    long long total = 0;
    for (const auto& node : nodes_)
        if (node.balancer) total += node.balancer->clamp_count;
    return total;
}

ColorTree build_color_tree(int n_colors, int dim, double c_param, RngSeed base_seed) {
    return ColorTree(n_colors, dim, c_param, base_seed);
}

} // namespace odel
