#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "autotune/dataset.hpp"
#include "autotune/errors.hpp"
#include "autotune/evaluation.hpp"
#include "autotune/genetic.hpp"
#include "autotune/grid_search.hpp"
#include "autotune/hooke_jeeves.hpp"
#include "autotune/learners.hpp"
#include "autotune/spaces.hpp"

namespace autotune {

enum class OptimizerKind { hooke_jeeves, genetic };

inline std::string to_string(OptimizerKind k) {
    return k == OptimizerKind::hooke_jeeves ? "hjn" : "ga";
}

inline OptimizerKind parse_optimizer(const std::string& s) {
    if (s == "hjn" || s == "hooke-jeeves") return OptimizerKind::hooke_jeeves;
    if (s == "ga" || s == "genetic") return OptimizerKind::genetic;
    throw DataError("unknown optimizer: " + s);
}

/// Default evaluation scheme: 10-fold CV, dropping to 3-fold past 2000 rows.
inline EvalScheme default_scheme(const Dataset& ds, std::uint64_t seed) {
    return EvalScheme::cv(ds.rows() <= 2000 ? 10 : 3, seed);
}

struct TuneRequest {
    Family family = Family::svm;
    OptimizerKind optimizer = OptimizerKind::hooke_jeeves;
    EvalScheme scheme = EvalScheme::cv(10);
    OptConfig opt_config;
    std::uint64_t seed = 0;
    int jobs = 1;
};

struct TuneResult {
    Family family = Family::svm;
    Task task = Task::classification;
    OptimizerKind optimizer = OptimizerKind::hooke_jeeves;
    std::map<std::string, double> best_params;  // keyed by registry dim names
    std::vector<double> best_point;             // registry dim order
    double search_loss = 0.0;
    ModelVariant model;  // refit on all rows at best_point
    int evaluations_used = 0;
    double elapsed_seconds = 0.0;
    EvalScheme scheme_used = EvalScheme::cv(10);
};

/// Builds the CV objective over the registry space and runs the requested
/// optimizer from the registry start point; the winner is refit on the full
/// dataset. The scheme seed is fixed for the whole run, so every candidate is
/// scored on the same partitions.
inline TuneResult tune(const Dataset& ds, const TuneRequest& req) {
    ds.require_encoded();
    const auto t0 = std::chrono::steady_clock::now();
    const SearchSpace space = registry_space(req.family, ds.task);

    OptConfig cfg = req.opt_config;
    cfg.seed = req.seed;
    const EvalScheme scheme = req.scheme.with_seed(req.scheme.seed != 0 ? req.scheme.seed
                                                                        : req.seed);

    const Objective objective = [&](const std::vector<double>& point) {
        return evaluate(ds, req.family, point, scheme, req.jobs).mean_loss;
    };

    const OptResult opt = req.optimizer == OptimizerKind::hooke_jeeves
                              ? hooke_jeeves(objective, space, cfg)
                              : genetic_algorithm(objective, space, cfg);

    TuneResult result;
    result.family = req.family;
    result.task = ds.task;
    result.optimizer = req.optimizer;
    result.best_point = opt.best_point;
    for (std::size_t i = 0; i < space.size(); ++i)
        result.best_params[space.dims[i].name] = opt.best_point[i];
    result.search_loss = opt.best_loss;
    result.evaluations_used = opt.evaluations_used;
    result.scheme_used = scheme;
    result.model = fit_model(ds, req.family, opt.best_point);
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

/// Independent k-fold verification of a tuning result: refits the winning
/// parameters on each training fold and scores the held-out fold.
inline CvResult cv_verify(const Dataset& ds, const TuneResult& result, int k, std::uint64_t seed,
                          int jobs = 1) {
    return evaluate(ds, result.family, result.best_point, EvalScheme::cv(k, seed), jobs);
}

/// Grid oracle over the registry space, scored with the same evaluate
/// objective the optimizers see.
inline GridResult run_grid(const Dataset& ds, Family family, const EvalScheme& scheme,
                           const std::vector<int>& points_per_dim, std::size_t cell_cap = 100000,
                           int jobs = 1) {
    const SearchSpace space = registry_space(family, ds.task);
    const CellFn fn = [&](const std::vector<double>& point) {
        const CvResult r = evaluate(ds, family, point, scheme, 1);
        return CellScore{r.mean_loss, r.ucl95, r.elapsed_seconds};
    };
    return grid_search(fn, space, points_per_dim, cell_cap, jobs);
}

struct BenchRepetition {
    int rep = 0;
    std::uint64_t seed = 0;
    std::map<std::string, double> best_params;
    double verified_loss = 0.0;
    double seconds = 0.0;
    double standardized_loss = 1.0;
    double standardized_time = 1.0;
    bool failed = false;
    std::string error;
};

struct BenchRequestReport {
    TuneRequest request;
    std::vector<BenchRepetition> repetitions;
    double mean_verified_loss = 0.0;  // over successful repetitions
    double mean_seconds = 0.0;
    int failures = 0;
};

struct BenchReport {
    Family family = Family::svm;
    GridResult grid;
    double grid_best_loss = 0.0;
    double grid_worst_loss = 0.0;
    std::vector<int> grid_points;
    EvalScheme grid_scheme = EvalScheme::cv(10);
    int verify_k = 10;
    std::vector<BenchRequestReport> requests;
};

/// Runs the grid once as the oracle, then each request `reps` times with
/// distinct seeds; every winner is freshly CV-verified and standardized
/// against the grid envelope. Failed repetitions are recorded with
/// standardized scores of 1 rather than aborting the report.
inline BenchReport benchmark(const Dataset& ds, const std::vector<TuneRequest>& requests,
                             const std::vector<int>& grid_points, int reps = 10,
                             int verify_k = 10, std::size_t cell_cap = 100000, int jobs = 1) {
    if (requests.empty()) throw InfeasibleError("benchmark: no requests");
    const Family family = requests.front().family;
    for (const auto& r : requests)
        if (r.family != family)
            throw InfeasibleError("benchmark: all requests must share one model family");
    if (reps < 1) throw InfeasibleError("benchmark: reps must be >= 1");

    BenchReport report;
    report.family = family;
    report.grid_points = grid_points;
    report.verify_k = verify_k;
    report.grid_scheme = default_scheme(ds, 104729);
    report.grid = run_grid(ds, family, report.grid_scheme, grid_points, cell_cap, jobs);
    report.grid_best_loss = report.grid.best_loss();
    report.grid_worst_loss = report.grid.worst_loss();

    const double gbl = report.grid_best_loss, gwl = report.grid.worst_loss();
    const double gbt = report.grid.best_seconds(), gwt = report.grid.worst_seconds();
    const bool loss_range_ok = gwl > gbl;
    const bool time_range_ok = gwt > gbt;

    for (const auto& request : requests) {
        BenchRequestReport rr;
        rr.request = request;
        double loss_sum = 0.0, sec_sum = 0.0;
        int ok = 0;
        for (int rep = 0; rep < reps; ++rep) {
            BenchRepetition row;
            row.rep = rep;
            row.seed = request.seed + static_cast<std::uint64_t>(rep);
            const auto t0 = std::chrono::steady_clock::now();
            try {
                TuneRequest run = request;
                run.seed = row.seed;
                run.scheme = request.scheme.with_seed(row.seed);
                run.jobs = jobs;
                const TuneResult tuned = tune(ds, run);
                const CvResult verified =
                    cv_verify(ds, tuned, verify_k, row.seed * 6364136223846793005ull + 7919, jobs);
                row.best_params = tuned.best_params;
                row.verified_loss = verified.mean_loss;
                row.seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                row.standardized_loss =
                    loss_range_ok
                        ? std::clamp((row.verified_loss - gbl) / (gwl - gbl), 0.0, 1.0)
                        : (row.verified_loss <= gbl ? 0.0 : 1.0);
                row.standardized_time =
                    time_range_ok ? std::clamp((row.seconds - gbt) / (gwt - gbt), 0.0, 1.0)
                                  : (row.seconds <= gbt ? 0.0 : 1.0);
                loss_sum += row.verified_loss;
                sec_sum += row.seconds;
                ++ok;
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
                row.standardized_loss = 1.0;
                row.standardized_time = 1.0;
                row.seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                ++rr.failures;
            }
            rr.repetitions.push_back(std::move(row));
        }
        if (ok > 0) {
            rr.mean_verified_loss = loss_sum / ok;
            rr.mean_seconds = sec_sum / ok;
        }
        report.requests.push_back(std::move(rr));
    }
    return report;
}

}  // namespace autotune
