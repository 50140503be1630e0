#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "autotune/optimizer_types.hpp"
#include "autotune/search_space.hpp"

namespace autotune {

/// Hooke-Jeeves pattern search over the unit cube. Exploratory moves probe
/// +/-step per coordinate keeping improvements; any improvement triggers
/// pattern moves that extrapolate base-to-new and re-explore; failures shrink
/// the step by the contraction factor. The final exploration always runs at
/// exactly min_step, so at termination no +/-min_step coordinate probe from
/// the returned point improves the loss (budget permitting). Probes are
/// clamped to the box; integer dimensions are evaluated at their rounded
/// natural value, with duplicate points served from a memo instead of
/// spending budget.
inline OptResult hooke_jeeves(const Objective& objective, const SearchSpace& space,
                              const OptConfig& cfg) {
    space.validate();
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t d = space.size();

    detail::EvalCounter counter(objective, space, cfg.max_evaluations);
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };

    // explores around (u, f) at the given step; returns false when the budget
    // ran out mid-exploration
    auto explore = [&](std::vector<double>& u, double& f, double step) -> bool {
        for (std::size_t i = 0; i < d; ++i) {
            const double orig = u[i];
            for (const double dir : {+1.0, -1.0}) {
                const double cand = clamp01(orig + dir * step);
                if (cand == orig) continue;
                u[i] = cand;
                double fc;
                if (!counter.eval(u, fc)) {
                    u[i] = orig;
                    return false;
                }
                if (fc < f) {
                    f = fc;
                    break;  // keep the improvement, move to the next coordinate
                }
                u[i] = orig;
            }
        }
        return true;
    };

    std::vector<double> base = to_unit(space.start_point(), space);
    double f_base;
    bool in_budget = counter.eval(base, f_base);
    double step = cfg.hj.initial_step;

    while (in_budget) {
        std::vector<double> trial = base;
        double f_trial = f_base;
        if (!explore(trial, f_trial, step)) break;

        if (f_trial < f_base) {
            // pattern moves as long as improvement continues
            std::vector<double> prev = base;
            base = trial;
            f_base = f_trial;
            for (;;) {
                std::vector<double> pattern(d);
                for (std::size_t i = 0; i < d; ++i)
                    pattern[i] = clamp01(base[i] + (base[i] - prev[i]));
                double f_pattern;
                if (!counter.eval(pattern, f_pattern)) {
                    in_budget = false;
                    break;
                }
                std::vector<double> probe = pattern;
                if (!explore(probe, f_pattern, step)) {
                    in_budget = false;
                    break;
                }
                if (f_pattern < f_base) {
                    prev = base;
                    base = probe;
                    f_base = f_pattern;
                } else {
                    break;
                }
            }
        } else {
            if (step <= cfg.hj.min_step) break;
            step = std::max(step * cfg.hj.contraction, cfg.hj.min_step);
        }
    }

    OptResult result;
    result.best_point = from_unit(counter.best_unit(), space);
    result.best_loss = counter.best_loss();
    result.evaluations_used = counter.used();
    result.trace = counter.take_trace();
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace autotune
