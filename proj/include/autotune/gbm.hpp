#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "autotune/dataset.hpp"
#include "autotune/errors.hpp"
#include "autotune/tree.hpp"

namespace autotune {

enum class GbmLoss { squared, logistic };

struct GbmParams {
    int n_trees = 100;
    int interaction_depth = 3;
    double shrinkage = 0.1;
    int min_obs_node = 5;
};

/// Stagewise additive tree ensemble. Raw score F(x) = init_value +
/// shrinkage * sum of tree outputs; classification passes F through a sigmoid
/// and thresholds at 0.5.
struct GbmModel {
    double init_value = 0.0;
    std::vector<Tree> trees;
    double shrinkage = 0.1;
    int n_trees = 0;
    int interaction_depth = 1;
    int min_obs_node = 1;
    GbmLoss loss = GbmLoss::squared;
    Task task = Task::regression;

    /// Raw additive score, optionally truncated to the first `upto` trees
    /// (upto < 0 means all trees).
    double score_row(std::span<const double> x, int upto = -1) const {
        const std::size_t m =
            upto < 0 ? trees.size() : std::min<std::size_t>(trees.size(), upto);
        double f = init_value;
        for (std::size_t t = 0; t < m; ++t) f += shrinkage * trees[t].predict_row(x);
        return f;
    }

    std::vector<double> score(const Matrix& rows, int upto = -1) const {
        std::vector<double> out(rows.rows());
        for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = score_row(rows.row(r), upto);
        return out;
    }

    std::vector<double> predict(const Matrix& rows, int upto = -1) const {
        std::vector<double> out = score(rows, upto);
        if (task == Task::classification)
            for (double& f : out) f = sigmoid(f) >= 0.5 ? 1.0 : 0.0;
        return out;
    }

    static double sigmoid(double f) { return 1.0 / (1.0 + std::exp(-f)); }
};

inline void validate(const GbmParams& p) {
    if (p.n_trees < 0) throw InfeasibleError("gbm: n_trees must be >= 0");
    if (p.interaction_depth < 1) throw InfeasibleError("gbm: interaction_depth must be >= 1");
    if (!(p.shrinkage > 0.0 && p.shrinkage <= 1.0))
        throw InfeasibleError("gbm: shrinkage must be in (0,1]");
    if (p.min_obs_node < 1) throw InfeasibleError("gbm: min_obs_node must be >= 1");
}

/// Gradient boosting. Squared loss fits each stage to the residuals y - F.
/// Logistic loss fits each stage to y - sigmoid(F) and re-estimates leaf
/// values with one Newton step (sum residual / sum p(1-p), denominator
/// guarded at 1e-12).
inline GbmModel fit_gbm(const Dataset& ds, const GbmParams& params) {
    ds.require_encoded();
    validate(params);
    const std::size_t n = ds.rows();
    if (n < 2) throw DataError("fit_gbm: needs at least 2 rows");

    GbmModel model;
    model.shrinkage = params.shrinkage;
    model.n_trees = params.n_trees;
    model.interaction_depth = params.interaction_depth;
    model.min_obs_node = params.min_obs_node;
    model.task = ds.task;
    model.loss = ds.task == Task::classification ? GbmLoss::logistic : GbmLoss::squared;
    model.trees.reserve(params.n_trees);

    const std::vector<double>& y = ds.response;
    std::vector<double> f(n), residual(n);

    if (model.loss == GbmLoss::logistic) {
        double pbar = 0.0;
        for (double v : y) pbar += v;
        pbar /= static_cast<double>(n);
        if (pbar <= 0.0 || pbar >= 1.0)
            throw DataError("fit_gbm: classification response has a single class");
        model.init_value = std::log(pbar / (1.0 - pbar));
    } else {
        double m = 0.0;
        for (double v : y) m += v;
        model.init_value = m / static_cast<double>(n);
    }
    std::fill(f.begin(), f.end(), model.init_value);

    TreeFitContext ctx(ds.features);
    std::vector<int> leaf_of;
    for (int stage = 0; stage < params.n_trees; ++stage) {
        if (model.loss == GbmLoss::logistic) {
            for (std::size_t i = 0; i < n; ++i)
                residual[i] = y[i] - GbmModel::sigmoid(f[i]);
        } else {
            for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - f[i];
        }

        Tree tree = fit_tree_with_context(ctx, residual, {}, params.interaction_depth,
                                          params.min_obs_node, &leaf_of);

        if (model.loss == GbmLoss::logistic) {
            // one Newton step per leaf
            std::vector<double> num(tree.nodes.size(), 0.0), den(tree.nodes.size(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double p = GbmModel::sigmoid(f[i]);
                num[leaf_of[i]] += residual[i];
                den[leaf_of[i]] += p * (1.0 - p);
            }
            for (std::size_t id = 0; id < tree.nodes.size(); ++id)
                if (tree.nodes[id].is_leaf())
                    tree.nodes[id].value = num[id] / std::max(den[id], 1e-12);
            for (std::size_t i = 0; i < n; ++i)
                f[i] += params.shrinkage * tree.nodes[leaf_of[i]].value;
        } else {
            for (std::size_t i = 0; i < n; ++i)
                f[i] += params.shrinkage * tree.nodes[leaf_of[i]].value;
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace autotune
