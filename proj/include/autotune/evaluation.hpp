#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "autotune/dataset.hpp"
#include "autotune/errors.hpp"
#include "autotune/learners.hpp"
#include "autotune/metrics.hpp"
#include "autotune/parallel.hpp"
#include "autotune/stats.hpp"

namespace autotune {

/// How a candidate parameter vector is scored: resubstitution, k-fold CV, or
/// a single fast holdout pass (fractional or fixed-count training side).
struct EvalScheme {
    enum class Kind { resub, cv, fast_fraction, fast_n };

    Kind kind = Kind::cv;
    int k = 10;
    double fraction = 0.5;
    long n = 0;
    std::uint64_t seed = 0;

    static EvalScheme resub(std::uint64_t seed = 0) { return {Kind::resub, 0, 0.0, 0, seed}; }
    static EvalScheme cv(int k, std::uint64_t seed = 0) {
        if (k < 2) throw InfeasibleError("EvalScheme: cv k must be >= 2");
        return {Kind::cv, k, 0.0, 0, seed};
    }
    static EvalScheme fast_fraction(double p, std::uint64_t seed = 0) {
        if (!(p > 0.0 && p < 1.0)) throw InfeasibleError("EvalScheme: fraction must be in (0,1)");
        return {Kind::fast_fraction, 0, p, 0, seed};
    }
    static EvalScheme fast_n(long n, std::uint64_t seed = 0) {
        if (n < 10) throw InfeasibleError("EvalScheme: fast n must be >= 10");
        return {Kind::fast_n, 0, 0.0, n, seed};
    }

    EvalScheme with_seed(std::uint64_t s) const {
        EvalScheme out = *this;
        out.seed = s;
        return out;
    }

    std::string describe() const {
        switch (kind) {
            case Kind::resub: return "resub";
            case Kind::cv: return "cv" + std::to_string(k);
            case Kind::fast_fraction: return "fast" + detail::format_double(fraction);
            case Kind::fast_n: return "fast" + std::to_string(n);
        }
        return "?";
    }
};

struct CvResult {
    double mean_loss = 0.0;
    std::vector<double> per_fold_losses;
    double ucl95 = 0.0;
    double elapsed_seconds = 0.0;
    int n_model_fits = 0;
};

namespace detail {

inline double loss_for(const Dataset& train_like, std::span<const double> predicted,
                       std::span<const double> actual) {
    return train_like.task == Task::classification ? misclassification_rate(predicted, actual)
                                                   : mse(predicted, actual);
}

inline std::string format_params(const std::vector<double>& params) {
    std::string s = "[";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) s += ", ";
        s += format_double(params[i]);
    }
    return s + "]";
}

}  // namespace detail

/// Upper 95% confidence limit on the mean of the fold losses (one-sided
/// Student-t). Collapses to the mean when there is a single fold or zero
/// spread.
inline double ucl95_of(std::span<const double> fold_losses) {
    const std::size_t k = fold_losses.size();
    const double m = mean(fold_losses);
    if (k < 2) return m;
    const double sd = sample_sd(fold_losses);
    if (sd == 0.0) return m;
    const double t = student_t_quantile(0.975, static_cast<double>(k - 1));
    return m + t * sd / std::sqrt(static_cast<double>(k));
}

/// Scores one (family, parameter vector) under the scheme. Deterministic for
/// fixed inputs including scheme.seed: the fold partition is a pure function
/// of (dataset size, k, seed), so every evaluation in an optimizer run with a
/// shared scheme compares candidates on identical partitions.
inline CvResult evaluate(const Dataset& ds, Family family, const std::vector<double>& params,
                         const EvalScheme& scheme, int jobs = 1) {
    ds.require_encoded();
    if (family == Family::ada && ds.task != Task::classification)
        throw InfeasibleError("adaboost does not support regression");

    const auto t0 = std::chrono::steady_clock::now();
    CvResult result;
    try {
        if (scheme.kind == EvalScheme::Kind::resub) {
            ModelVariant model = fit_model(ds, family, params);
            const auto pred = predict_model(model, ds.features);
            result.per_fold_losses = {detail::loss_for(ds, pred, ds.response)};
            result.n_model_fits = 1;
        } else if (scheme.kind == EvalScheme::Kind::cv) {
            const FoldAssignment fa = kfold(ds, scheme.k, scheme.seed);
            result.per_fold_losses.resize(fa.k);
            parallel_for(static_cast<std::size_t>(fa.k), jobs, [&](std::size_t f) {
                const Dataset train = ds.subset(fa.rows_not_in_fold(static_cast<int>(f)));
                const Dataset val = ds.subset(fa.rows_in_fold(static_cast<int>(f)));
                ModelVariant model = fit_model(train, family, params);
                const auto pred = predict_model(model, val.features);
                result.per_fold_losses[f] = detail::loss_for(ds, pred, val.response);
            });
            result.n_model_fits = fa.k;
        } else {
            const auto [train, val] =
                scheme.kind == EvalScheme::Kind::fast_fraction
                    ? holdout_split(ds, scheme.fraction, 0, scheme.seed)
                    : holdout_split(ds, 0.0, scheme.n, scheme.seed);
            ModelVariant model = fit_model(train, family, params);
            const auto pred = predict_model(model, val.features);
            result.per_fold_losses = {detail::loss_for(ds, pred, val.response)};
            result.n_model_fits = 1;
        }
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(std::string(e.what()) + " at params " +
                              detail::format_params(params));
    } catch (const DataError& e) {
        throw DataError(std::string(e.what()) + " at params " + detail::format_params(params));
    }

    result.mean_loss = mean(result.per_fold_losses);
    result.ucl95 = ucl95_of(result.per_fold_losses);
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

struct RawScore {
    std::string label;
    double loss = 0.0;
    double time_seconds = 0.0;
    bool failed = false;
};

struct StandardizedScore {
    std::string label;
    double loss = 0.0;  // in [0,1]
    double time = 0.0;  // in [0,1]
    bool failed = false;
};

/// Maps raw (loss, time) pairs onto [0,1] against the grid-search envelope:
/// scaled = (raw - grid_best) / (grid_worst - grid_best), clamped. Failed
/// entries score 1 on both axes.
inline std::vector<StandardizedScore> standardize_scores(std::span<const RawScore> raw,
                                                         double grid_best_loss,
                                                         double grid_worst_loss,
                                                         double grid_best_time,
                                                         double grid_worst_time) {
    if (!(grid_worst_loss > grid_best_loss))
        throw InfeasibleError("standardize_scores: degenerate grid loss range");
    if (!(grid_worst_time > grid_best_time))
        throw InfeasibleError("standardize_scores: degenerate grid time range");
    auto scale = [](double v, double best, double worst) {
        return std::clamp((v - best) / (worst - best), 0.0, 1.0);
    };
    std::vector<StandardizedScore> out;
    out.reserve(raw.size());
    for (const auto& r : raw) {
        StandardizedScore s;
        s.label = r.label;
        s.failed = r.failed || !std::isfinite(r.loss) || !std::isfinite(r.time_seconds);
        s.loss = s.failed ? 1.0 : scale(r.loss, grid_best_loss, grid_worst_loss);
        s.time = s.failed ? 1.0 : scale(r.time_seconds, grid_best_time, grid_worst_time);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace autotune
