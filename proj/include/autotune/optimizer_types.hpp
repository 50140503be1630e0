#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "autotune/errors.hpp"
#include "autotune/search_space.hpp"

namespace autotune {

/// Objective over natural-unit points, to be minimized.
using Objective = std::function<double(const std::vector<double>&)>;

struct HookeJeevesConfig {
    double initial_step = 0.25;  // in unit coordinates
    double contraction = 0.5;
    double min_step = 1e-3;
};

struct GeneticConfig {
    int population = 20;
    int generations = 50;
    double crossover_rate = 0.8;
    double mutation_rate = 0.1;
    double mutation_sd = 0.1;
    int elitism = 2;
    int tournament = 3;
};

struct OptConfig {
    int max_evaluations = 1000;
    std::uint64_t seed = 0;
    HookeJeevesConfig hj;
    GeneticConfig ga;

    void validate() const {
        if (max_evaluations < 1) throw InfeasibleError("OptConfig: max_evaluations must be >= 1");
        if (!(hj.initial_step > 0.0 && hj.initial_step <= 1.0))
            throw InfeasibleError("OptConfig: hj.initial_step must be in (0,1]");
        if (!(hj.contraction > 0.0 && hj.contraction < 1.0))
            throw InfeasibleError("OptConfig: hj.contraction must be in (0,1)");
        if (!(hj.min_step > 0.0)) throw InfeasibleError("OptConfig: hj.min_step must be > 0");
        if (ga.population < 4) throw InfeasibleError("OptConfig: ga.population must be >= 4");
        if (ga.generations < 1) throw InfeasibleError("OptConfig: ga.generations must be >= 1");
        if (ga.crossover_rate < 0.0 || ga.crossover_rate > 1.0 || ga.mutation_rate < 0.0 ||
            ga.mutation_rate > 1.0)
            throw InfeasibleError("OptConfig: ga rates must be in [0,1]");
        if (!(ga.mutation_sd > 0.0)) throw InfeasibleError("OptConfig: ga.mutation_sd must be > 0");
        if (ga.elitism < 0 || ga.elitism >= ga.population)
            throw InfeasibleError("OptConfig: ga.elitism must be < population");
        if (ga.tournament < 1 || ga.tournament > ga.population)
            throw InfeasibleError("OptConfig: ga.tournament must be in [1, population]");
    }
};

struct OptResult {
    std::vector<double> best_point;  // natural units
    double best_loss = 0.0;
    int evaluations_used = 0;
    std::vector<std::pair<int, double>> trace;  // (evaluation index, best-so-far loss)
    double elapsed_seconds = 0.0;
};

namespace detail {

/// Budget-enforcing objective wrapper in unit coordinates. Rounds through the
/// space's natural units (so integer dims collapse onto their grid) and
/// memoizes by the rounded natural point: duplicate probes do not spend
/// budget or recompute.
class EvalCounter {
public:
    EvalCounter(const Objective& objective, const SearchSpace& space, int max_evaluations)
        : objective_(&objective), space_(&space), budget_(max_evaluations) {}

    /// Evaluates unit point u; returns false when the budget is exhausted and
    /// the value is not cached.
    bool eval(const std::vector<double>& u, double& loss_out,
              std::vector<double>* natural_out = nullptr) {
        std::vector<double> natural = from_unit(u, *space_);
        if (natural_out) *natural_out = natural;
        if (const auto it = memo_.find(natural); it != memo_.end()) {
            loss_out = it->second;
            return true;
        }
        if (used_ >= budget_) return false;
        const double loss = (*objective_)(natural);
        ++used_;
        memo_.emplace(std::move(natural), loss);
        loss_out = loss;
        if (loss < best_loss_) {
            best_loss_ = loss;
            best_unit_ = u;
        }
        trace_.emplace_back(used_, best_loss_);
        return true;
    }

    bool exhausted() const { return used_ >= budget_; }
    int used() const { return used_; }
    double best_loss() const { return best_loss_; }
    const std::vector<double>& best_unit() const { return best_unit_; }
    std::vector<std::pair<int, double>> take_trace() { return std::move(trace_); }

private:
    const Objective* objective_;
    const SearchSpace* space_;
    int budget_;
    int used_ = 0;
    std::map<std::vector<double>, double> memo_;
    double best_loss_ = std::numeric_limits<double>::infinity();
    std::vector<double> best_unit_;
    std::vector<std::pair<int, double>> trace_;
};

}  // namespace detail

}  // namespace autotune
