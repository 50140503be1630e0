#pragma once

#include <cmath>
#include <vector>

#include "autotune/dataset.hpp"
#include "autotune/errors.hpp"
#include "autotune/tree.hpp"

namespace autotune {

struct AdaParams {
    int n_trees = 100;
    int depth = 3;
    double shrinkage = 0.1;  // nu, multiplies every stage weight
};

/// Per-stage fitting record, filled when a trace pointer is passed to
/// fit_adaboost. Used by invariant checks.
struct AdaTrace {
    std::vector<double> stage_errors;  // weighted error of each accepted stage
    std::vector<double> weight_sums;   // row-weight sum after each renormalization
};

/// Discrete adaboost ensemble with a learning rate. Trees vote through their
/// thresholded output mapped to {-1,+1}; vote weights are the stage alphas.
struct AdaModel {
    std::vector<Tree> trees;
    std::vector<double> stage_weights;
    double shrinkage = 0.1;
    int n_trees = 0;  // requested stages; early stop may store fewer
    int depth = 1;
    Task task = Task::classification;

    double score_row(std::span<const double> x, int upto = -1) const {
        const std::size_t m =
            upto < 0 ? trees.size() : std::min<std::size_t>(trees.size(), upto);
        double s = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
            const double vote = trees[t].predict_row(x) >= 0.5 ? 1.0 : -1.0;
            s += stage_weights[t] * vote;
        }
        return s;
    }

    std::vector<double> predict(const Matrix& rows, int upto = -1) const {
        std::vector<double> out(rows.rows());
        for (std::size_t r = 0; r < rows.rows(); ++r)
            out[r] = score_row(rows.row(r), upto) > 0.0 ? 1.0 : 0.0;
        return out;
    }
};

inline void validate(const AdaParams& p) {
    if (p.n_trees < 1) throw InfeasibleError("adaboost: n_trees must be >= 1");
    if (p.depth < 1) throw InfeasibleError("adaboost: depth must be >= 1");
    if (!(p.shrinkage > 0.0 && p.shrinkage <= 1.0))
        throw InfeasibleError("adaboost: shrinkage must be in (0,1]");
}

/// Weighted-resampling-free discrete adaboost: uniform starting weights, each
/// stage fits a weighted tree, alpha_m = shrinkage * log((1-err)/err),
/// misclassified rows are upweighted by exp(alpha_m) and weights renormalized.
/// Stops early when err >= 0.5 (stage rejected) or err == 0 (stage kept with
/// alpha capped at shrinkage * log(1e10)).
inline AdaModel fit_adaboost(const Dataset& ds, const AdaParams& params,
                             AdaTrace* trace = nullptr) {
    ds.require_encoded();
    validate(params);
    if (ds.task != Task::classification)
        throw InfeasibleError("adaboost does not support regression");
    const std::size_t n = ds.rows();
    if (n < 2) throw DataError("fit_adaboost: needs at least 2 rows");
    const std::size_t pos = ds.n_positive();
    if (pos == 0 || pos == n) throw DataError("fit_adaboost: single-class dataset");

    AdaModel model;
    model.shrinkage = params.shrinkage;
    model.n_trees = params.n_trees;
    model.depth = params.depth;

    const std::vector<double>& y = ds.response;
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    TreeFitContext ctx(ds.features);

    for (int stage = 0; stage < params.n_trees; ++stage) {
        Tree tree = fit_tree_with_context(ctx, y, w, params.depth, 1);

        double err = 0.0;
        std::vector<char> miss(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const double h = tree.predict_row(ds.features.row(i)) >= 0.5 ? 1.0 : 0.0;
            if (h != y[i]) {
                miss[i] = 1;
                err += w[i];
            }
        }

        if (err >= 0.5) break;

        double alpha;
        bool last_stage = false;
        if (err == 0.0) {
            alpha = params.shrinkage * std::log(1e10);
            last_stage = true;
        } else {
            alpha = params.shrinkage * std::log((1.0 - err) / err);
        }
        model.trees.push_back(std::move(tree));
        model.stage_weights.push_back(alpha);

        const double boost = std::exp(alpha);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (miss[i]) w[i] *= boost;
            sum += w[i];
        }
        for (std::size_t i = 0; i < n; ++i) w[i] /= sum;

        if (trace) {
            trace->stage_errors.push_back(err);
            double check = 0.0;
            for (double wi : w) check += wi;
            trace->weight_sums.push_back(check);
        }
        if (last_stage) break;
    }
    return model;
}

}  // namespace autotune
