#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "autotune/errors.hpp"
#include "autotune/matrix.hpp"

namespace autotune {

/// Binary regression tree node. Internal nodes route rows by
/// x[col] <= threshold; leaves carry a real prediction.
struct TreeNode {
    int col = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const { return col < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict_row(std::span<const double> x) const {
        int id = 0;
        while (!nodes[id].is_leaf())
            id = x[static_cast<std::size_t>(nodes[id].col)] <= nodes[id].threshold
                     ? nodes[id].left
                     : nodes[id].right;
        return nodes[id].value;
    }

    int leaf_index(std::span<const double> x) const {
        int id = 0;
        while (!nodes[id].is_leaf())
            id = x[static_cast<std::size_t>(nodes[id].col)] <= nodes[id].threshold
                     ? nodes[id].left
                     : nodes[id].right;
        return id;
    }

    std::vector<double> predict(const Matrix& rows) const {
        std::vector<double> out(rows.rows());
        for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = predict_row(rows.row(r));
        return out;
    }

    int depth() const { return depth_below(0); }
    std::size_t leaf_count() const {
        std::size_t c = 0;
        for (const auto& n : nodes) c += n.is_leaf();
        return c;
    }

private:
    int depth_below(int id) const {
        if (nodes[id].is_leaf()) return 0;
        return 1 + std::max(depth_below(nodes[id].left), depth_below(nodes[id].right));
    }
};

/// Per-feature sort orders, computed once per training matrix and shared by
/// every boosting stage fit against it.
class TreeFitContext {
public:
    explicit TreeFitContext(const Matrix& features) : features_(&features) {
        const std::size_t n = features.rows(), d = features.cols();
        order_.resize(d);
        for (std::size_t c = 0; c < d; ++c) {
            auto& ord = order_[c];
            ord.resize(n);
            std::iota(ord.begin(), ord.end(), 0);
            std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
                return features(static_cast<std::size_t>(a), c) <
                       features(static_cast<std::size_t>(b), c);
            });
        }
    }

    const Matrix& features() const { return *features_; }
    const std::vector<int>& order(std::size_t col) const { return order_[col]; }

private:
    const Matrix* features_;
    std::vector<std::vector<int>> order_;
};

namespace detail {

struct BuildNode {
    std::int64_t count = 0;
    double weight = 0.0;  // sum of row weights
    double wsum = 0.0;    // sum of weight * target
    double value = 0.0;   // weighted mean (leaf prediction)
    int depth = 0;
    int split_col = -1;
    double split_threshold = 0.0;
    double split_gain = 0.0;
    int left = -1;
    int right = -1;
};

}  // namespace detail

/// Greedy CART with weighted squared-error splits. Thresholds are midpoints
/// between consecutive distinct sorted values; ties break to the lowest
/// column, then the lowest threshold. Growth stops at max_depth, when a node
/// has fewer than 2*min_obs rows, or when no split reduces the error. Every
/// leaf keeps at least min_obs training rows. Degenerate input (too few rows,
/// all-zero weights) yields a single-leaf tree.
///
/// leaf_of_row, when non-null, receives the node index each training row
/// landed in (used for leaf re-estimation in boosting).
inline Tree fit_tree_with_context(const TreeFitContext& ctx, std::span<const double> targets,
                                  std::span<const double> weights, int max_depth, int min_obs,
                                  std::vector<int>* leaf_of_row = nullptr) {
    const Matrix& X = ctx.features();
    const std::size_t n = X.rows(), d = X.cols();
    if (targets.size() != n) throw DataError("fit_tree: target length mismatch");
    if (!weights.empty() && weights.size() != n)
        throw DataError("fit_tree: weight length mismatch");
    if (max_depth < 0) max_depth = 0;
    if (min_obs < 1) min_obs = 1;

    std::vector<detail::BuildNode> build(1);
    {
        auto& root = build[0];
        root.count = static_cast<std::int64_t>(n);
        for (std::size_t r = 0; r < n; ++r) {
            const double w = weights.empty() ? 1.0 : weights[r];
            root.weight += w;
            root.wsum += w * targets[r];
        }
        if (root.weight > 1e-300) {
            root.value = root.wsum / root.weight;
        } else {
            double s = 0.0;
            for (double t : targets) s += t;
            root.value = n ? s / static_cast<double>(n) : 0.0;
        }
    }
    std::vector<int> node_of(n, 0);

    std::vector<int> active;  // node ids open for splitting at the current level
    if (max_depth > 0 && build[0].count >= 2 * static_cast<std::int64_t>(min_obs))
        active.push_back(0);

    struct ScanState {
        std::int64_t count;
        double weight;
        double wsum;
        double last_value;
    };
    std::vector<int> slot_of;
    std::vector<ScanState> scan;

    while (!active.empty()) {
        slot_of.assign(build.size(), -1);
        for (std::size_t s = 0; s < active.size(); ++s) slot_of[active[s]] = static_cast<int>(s);

        for (std::size_t col = 0; col < d; ++col) {
            scan.assign(active.size(), {0, 0.0, 0.0, 0.0});
            for (int r : ctx.order(col)) {
                const std::size_t row = static_cast<std::size_t>(r);
                const int nid = node_of[row];
                const int slot = slot_of[static_cast<std::size_t>(nid)];
                if (slot < 0) continue;
                auto& st = scan[static_cast<std::size_t>(slot)];
                auto& nd = build[static_cast<std::size_t>(nid)];
                const double v = X(row, col);
                if (st.count > 0 && v > st.last_value) {
                    const std::int64_t right_count = nd.count - st.count;
                    if (st.count >= min_obs && right_count >= min_obs) {
                        const double wl = st.weight, wr = nd.weight - st.weight;
                        const double sl = st.wsum, sr = nd.wsum - st.wsum;
                        const double parent_score =
                            nd.weight > 1e-300 ? nd.wsum * nd.wsum / nd.weight : 0.0;
                        double gain = -parent_score;
                        if (wl > 1e-300) gain += sl * sl / wl;
                        if (wr > 1e-300) gain += sr * sr / wr;
                        const double eps = 1e-12 * std::max(1.0, std::fabs(parent_score));
                        if (gain > eps && gain > nd.split_gain) {
                            nd.split_gain = gain;
                            nd.split_col = static_cast<int>(col);
                            nd.split_threshold = 0.5 * (st.last_value + v);
                        }
                    }
                }
                const double w = weights.empty() ? 1.0 : weights[row];
                ++st.count;
                st.weight += w;
                st.wsum += w * targets[row];
                st.last_value = v;
            }
        }

        // materialize children for nodes that found a split
        const std::size_t before = build.size();
        for (int nid : active) {
            auto& nd = build[static_cast<std::size_t>(nid)];
            if (nd.split_col < 0) continue;
            detail::BuildNode child;
            child.depth = nd.depth + 1;
            nd.left = static_cast<int>(build.size());
            nd.right = nd.left + 1;
            build.push_back(child);
            build.push_back(child);
        }
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t nid = static_cast<std::size_t>(node_of[r]);
            if (nid >= before) continue;
            const auto& nd = build[nid];
            if (nd.left < 0 || slot_of[nid] < 0) continue;
            const int child =
                X(r, static_cast<std::size_t>(nd.split_col)) <= nd.split_threshold ? nd.left
                                                                                   : nd.right;
            auto& cn = build[static_cast<std::size_t>(child)];
            const double w = weights.empty() ? 1.0 : weights[r];
            ++cn.count;
            cn.weight += w;
            cn.wsum += w * targets[r];
            node_of[r] = child;
        }
        std::vector<int> next_active;
        for (int nid : active) {
            const auto& nd = build[static_cast<std::size_t>(nid)];
            if (nd.left < 0) continue;
            for (int child : {nd.left, nd.right}) {
                auto& cn = build[static_cast<std::size_t>(child)];
                cn.value = cn.weight > 1e-300 ? cn.wsum / cn.weight : nd.value;
                if (cn.depth < max_depth && cn.count >= 2 * static_cast<std::int64_t>(min_obs))
                    next_active.push_back(child);
            }
        }
        active = std::move(next_active);
    }

    Tree tree;
    tree.nodes.resize(build.size());
    for (std::size_t i = 0; i < build.size(); ++i) {
        auto& out = tree.nodes[i];
        const auto& nd = build[i];
        if (nd.left >= 0) {
            out.col = nd.split_col;
            out.threshold = nd.split_threshold;
            out.left = nd.left;
            out.right = nd.right;
        }
        out.value = nd.value;
    }

    if (leaf_of_row) leaf_of_row->assign(node_of.begin(), node_of.end());
    return tree;
}

inline Tree fit_tree(const Matrix& features, std::span<const double> targets,
                     std::span<const double> weights, int max_depth, int min_obs,
                     std::vector<int>* leaf_of_row = nullptr) {
    TreeFitContext ctx(features);
    return fit_tree_with_context(ctx, targets, weights, max_depth, min_obs, leaf_of_row);
}

}  // namespace autotune
