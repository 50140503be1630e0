#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "autotune/optimizer_types.hpp"
#include "autotune/search_space.hpp"

namespace autotune {

struct GaTrace {
    std::vector<double> generation_best;  // best population loss after each generation
};

/// Real-coded genetic algorithm over the unit cube. The initial population is
/// the space's start point plus uniform random points; selection is
/// tournament, crossover is a blend over the parent interval extended 25%
/// each side, mutation adds clamped Gaussian noise per gene, and the best
/// cfg.ga.elitism members survive unchanged. Deterministic for a fixed seed.
inline OptResult genetic_algorithm(const Objective& objective, const SearchSpace& space,
                                   const OptConfig& cfg, GaTrace* ga_trace = nullptr) {
    space.validate();
    cfg.validate();
    if (cfg.ga.population > cfg.max_evaluations)
        throw InfeasibleError("genetic_algorithm: population exceeds evaluation budget");

    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t d = space.size();
    const std::size_t pop_size = static_cast<std::size_t>(cfg.ga.population);

    detail::EvalCounter counter(objective, space, cfg.max_evaluations);
    std::mt19937_64 rng(cfg.seed);
    auto rand01 = [&] { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); };
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<std::vector<double>> pop(pop_size, std::vector<double>(d));
    std::vector<double> fitness(pop_size);

    pop[0] = to_unit(space.start_point(), space);
    for (std::size_t i = 1; i < pop_size; ++i)
        for (std::size_t g = 0; g < d; ++g) pop[i][g] = rand01();

    bool in_budget = true;
    for (std::size_t i = 0; i < pop_size && in_budget; ++i)
        in_budget = counter.eval(pop[i], fitness[i]);

    auto tournament = [&]() -> std::size_t {
        std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);
        std::size_t winner = pick(rng);
        for (int t = 1; t < cfg.ga.tournament; ++t) {
            const std::size_t cand = pick(rng);
            if (fitness[cand] < fitness[winner]) winner = cand;
        }
        return winner;
    };

    for (int gen = 0; gen < cfg.ga.generations && in_budget; ++gen) {
        std::vector<std::size_t> order(pop_size);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });

        std::vector<std::vector<double>> next(pop_size, std::vector<double>(d));
        std::vector<double> next_fitness(pop_size);
        const std::size_t elite = static_cast<std::size_t>(cfg.ga.elitism);
        for (std::size_t e = 0; e < elite; ++e) {
            next[e] = pop[order[e]];
            next_fitness[e] = fitness[order[e]];
        }

        std::size_t filled = elite;
        for (std::size_t slot = elite; slot < pop_size; ++slot) {
            const std::size_t pa = tournament();
            const std::size_t pb = tournament();
            std::vector<double>& child = next[slot];
            if (rand01() < cfg.ga.crossover_rate) {
                for (std::size_t g = 0; g < d; ++g) {
                    const double a = pop[pa][g], b = pop[pb][g];
                    const double lo = std::min(a, b), hi = std::max(a, b);
                    const double ext = 0.25 * (hi - lo);
                    const double v = (lo - ext) + rand01() * ((hi + ext) - (lo - ext));
                    child[g] = std::clamp(v, 0.0, 1.0);
                }
            } else {
                child = pop[pa];
            }
            for (std::size_t g = 0; g < d; ++g)
                if (rand01() < cfg.ga.mutation_rate)
                    child[g] = std::clamp(child[g] + cfg.ga.mutation_sd * gauss(rng), 0.0, 1.0);

            if (!counter.eval(child, next_fitness[slot])) {
                in_budget = false;
                break;
            }
            filled = slot + 1;
        }

        if (filled == pop_size) {
            pop = std::move(next);
            fitness = std::move(next_fitness);
        }
        if (ga_trace) {
            double best = fitness[0];
            if (filled == pop_size)
                for (std::size_t i = 1; i < pop_size; ++i) best = std::min(best, fitness[i]);
            else
                best = counter.best_loss();
            ga_trace->generation_best.push_back(best);
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
