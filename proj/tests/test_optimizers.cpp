#include <catch2/catch.hpp>

#include <cmath>
#include <set>

#include "autotune/genetic.hpp"
#include "autotune/grid_search.hpp"
#include "autotune/hooke_jeeves.hpp"

using namespace autotune;

namespace {

SearchSpace unit_box(std::size_t d, double start = 0.5) {
    SearchSpace s;
    for (std::size_t i = 0; i < d; ++i)
        s.dims.push_back({"u" + std::to_string(i), 0.0, 1.0, Scale::linear, false, start});
    return s;
}

Objective sphere_at(std::vector<double> target) {
    return [target = std::move(target)](const std::vector<double>& p) {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - target[i]) * (p[i] - target[i]);
        return s;
    };
}

}  // namespace

TEST_CASE("unit transforms cover log2 and integer scales", "[optimizers]") {
    SearchSpace s;
    s.dims = {{"cost", 1.0, 1024.0, Scale::log2, false, 10.0},
              {"depth", 1.0, 15.0, Scale::linear, true, 5.0}};
    CHECK(to_unit({1.0, 1.0}, s)[0] == Approx(0.0));
    CHECK(to_unit({32.0, 1.0}, s)[0] == Approx(0.5));
    CHECK(to_unit({1024.0, 15.0}, s)[0] == Approx(1.0));
    CHECK(from_unit({0.5, 0.49}, s)[0] == Approx(32.0));
    CHECK(from_unit({0.5, 0.49}, s)[1] == 8.0);  // round(1 + 0.49*14)
    CHECK_THROWS_AS(to_unit({2000.0, 3.0}, s), InfeasibleError);
    CHECK_THROWS_AS(from_unit({1.5, 0.0}, s), InfeasibleError);
    // identity on representable points
    for (double cost : {1.0, 2.0, 32.0, 512.0, 1024.0})
        for (double depth : {1.0, 7.0, 15.0}) {
            const auto round_trip = from_unit(to_unit({cost, depth}, s), s);
            CHECK(round_trip[0] == Approx(cost).epsilon(1e-12));
            CHECK(round_trip[1] == depth);
        }
}

TEST_CASE("hooke-jeeves finds an off-axis optimum precisely", "[optimizers]") {
    const std::vector<double> target{0.3, 0.7, 0.5};
    OptConfig cfg;
    cfg.max_evaluations = 2000;
    OptResult r = hooke_jeeves(sphere_at(target), unit_box(3), cfg);
    CHECK(std::sqrt(r.best_loss) < 1e-3);
    CHECK(r.evaluations_used <= 2000);
}

TEST_CASE("a constant objective returns the start point", "[optimizers]") {
    OptConfig cfg;
    const SearchSpace space = unit_box(2, 0.25);
    OptResult r = hooke_jeeves([](const std::vector<double>&) { return 7.5; }, space, cfg);
    CHECK(r.best_loss == 7.5);
    CHECK(r.best_point == std::vector<double>{0.25, 0.25});
}

TEST_CASE("the best-so-far trace never increases", "[optimizers]") {
    OptConfig cfg;
    cfg.seed = 4;
    for (const bool use_ga : {false, true}) {
        const Objective obj = sphere_at({0.2, 0.9});
        OptResult r = use_ga ? genetic_algorithm(obj, unit_box(2), cfg)
                             : hooke_jeeves(obj, unit_box(2), cfg);
        REQUIRE(!r.trace.empty());
        for (std::size_t i = 1; i < r.trace.size(); ++i)
            CHECK(r.trace[i].second <= r.trace[i - 1].second);
        CHECK(r.trace.back().second == r.best_loss);
    }
}

TEST_CASE("optimizers never probe outside the box", "[optimizers]") {
    SearchSpace s;
    s.dims = {{"a", -2.0, 6.0, Scale::linear, false, 0.0},
              {"b", 0.5, 8.0, Scale::log2, false, 1.0},
              {"c", 1.0, 9.0, Scale::linear, true, 4.0}};
    double lo = 1e300, hi = -1e300;
    const Objective watcher = [&](const std::vector<double>& p) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double u = (p[i] - s.dims[i].lower) / (s.dims[i].upper - s.dims[i].lower);
            lo = std::min(lo, u);
            hi = std::max(hi, u);
            REQUIRE(p[i] >= s.dims[i].lower);
            REQUIRE(p[i] <= s.dims[i].upper);
        }
        return std::fabs(p[0] - 1.3) + std::fabs(std::log2(p[1]) - 2.0) + std::fabs(p[2] - 7);
    };
    OptConfig cfg;
    cfg.seed = 9;
    hooke_jeeves(watcher, s, cfg);
    genetic_algorithm(watcher, s, cfg);
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
}

TEST_CASE("integer dimensions are memoized after rounding", "[optimizers]") {
    SearchSpace s;
    s.dims = {{"n", 1.0, 9.0, Scale::linear, true, 5.0}};
    std::set<double> seen;
    int calls = 0;
    const Objective obj = [&](const std::vector<double>& p) {
        ++calls;
        REQUIRE(seen.insert(p[0]).second);  // each rounded point evaluated once
        return (p[0] - 7.0) * (p[0] - 7.0);
    };
    OptConfig cfg;
    OptResult r = hooke_jeeves(obj, s, cfg);
    CHECK(r.best_point[0] == 7.0);
    CHECK(calls == r.evaluations_used);
    CHECK(calls <= 9);
}

TEST_CASE("runs are deterministic given a seed", "[optimizers]") {
    OptConfig cfg;
    cfg.seed = 123;
    const Objective obj = sphere_at({0.42, 0.17});
    OptResult g1 = genetic_algorithm(obj, unit_box(2), cfg);
    OptResult g2 = genetic_algorithm(obj, unit_box(2), cfg);
    CHECK(g1.best_point == g2.best_point);
    CHECK(g1.best_loss == g2.best_loss);
    CHECK(g1.trace == g2.trace);
    OptResult h1 = hooke_jeeves(obj, unit_box(2), cfg);
    OptResult h2 = hooke_jeeves(obj, unit_box(2), cfg);
    CHECK(h1.best_point == h2.best_point);
    CHECK(h1.trace == h2.trace);
}

TEST_CASE("budgets are hard limits", "[optimizers]") {
    OptConfig cfg;
    cfg.max_evaluations = 25;
    OptResult h = hooke_jeeves(sphere_at({0.1, 0.9, 0.4}), unit_box(3), cfg);
    CHECK(h.evaluations_used <= 25);
    cfg.max_evaluations = 30;
    OptResult g = genetic_algorithm(sphere_at({0.1, 0.9, 0.4}), unit_box(3), cfg);
    CHECK(g.evaluations_used <= 30);
    cfg.max_evaluations = 10;  // smaller than the population
    CHECK_THROWS_AS(genetic_algorithm(sphere_at({0.5, 0.5}), unit_box(2), cfg), InfeasibleError);
}

TEST_CASE("hooke-jeeves ends min-step stationary on a quadratic", "[optimizers]") {
    const std::vector<double> target{0.31, 0.64};
    const Objective obj = sphere_at(target);
    OptConfig cfg;
    OptResult r = hooke_jeeves(obj, unit_box(2), cfg);
    const auto u = to_unit(r.best_point, unit_box(2));
    for (std::size_t d = 0; d < u.size(); ++d)
        for (double dir : {+1.0, -1.0}) {
            auto probe = u;
            probe[d] = std::clamp(probe[d] + dir * cfg.hj.min_step, 0.0, 1.0);
            CHECK(obj(probe) >= r.best_loss - 1e-15);
        }
}

TEST_CASE("the genetic algorithm solves the sphere for most seeds", "[optimizers]") {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        OptConfig cfg;
        cfg.seed = seed;
        OptResult r = genetic_algorithm(sphere_at({0.3, 0.7}), unit_box(2), cfg);
        if (r.best_loss < 1e-3) ++hits;
    }
    CHECK(hits >= 8);
}

TEST_CASE("elitism keeps the generation best monotone", "[optimizers]") {
    OptConfig cfg;
    cfg.seed = 31;
    cfg.ga.elitism = 1;
    GaTrace trace;
    genetic_algorithm(sphere_at({0.8, 0.2}), unit_box(2), cfg, &trace);
    REQUIRE(!trace.generation_best.empty());
    for (std::size_t i = 1; i < trace.generation_best.size(); ++i)
        CHECK(trace.generation_best[i] <= trace.generation_best[i - 1] + 1e-15);
}

TEST_CASE("grid lattices enumerate exactly", "[optimizers]") {
    SearchSpace s;
    s.dims = {{"a", 0.0, 1.0, Scale::linear, false, 0.0},
              {"b", 1.0, 4.0, Scale::log2, false, 1.0}};
    GridResult g = grid_search(as_cell_fn(sphere_at({0.5, 0.5})), s, {3, 3});
    CHECK(g.cells.size() == 9);
    CHECK(g.cells[0].point == std::vector<double>{0.0, 1.0});
    CHECK(g.cells[1].point == std::vector<double>{0.0, 2.0});  // log2 lattice: 1,2,4
    CHECK(g.cells[8].point == std::vector<double>{1.0, 4.0});
    for (const auto& c : g.cells) CHECK(g.best_loss() <= c.loss);
}

TEST_CASE("integer grid levels dedupe", "[optimizers]") {
    SearchSpace::Dim d{"n", 5.0, 10.0, Scale::linear, true, 5.0};
    CHECK(grid_levels(d, 2) == std::vector<double>{5.0, 10.0});
    CHECK(grid_levels(d, 20).size() == 6);
    SearchSpace::Dim depth{"d", 1.0, 15.0, Scale::linear, true, 1.0};
    CHECK(grid_levels(depth, 4) == std::vector<double>{1.0, 6.0, 10.0, 15.0});
    CHECK(grid_levels(depth, 1) == std::vector<double>{8.0});
}

TEST_CASE("the cell cap is enforced", "[optimizers]") {
    SearchSpace s = unit_box(3);
    CHECK_THROWS_AS(grid_search(as_cell_fn(sphere_at({0, 0, 0})), s, {100, 100, 100}, 100000),
                    ResourceCapError);
}

TEST_CASE("pattern search competes with an exhaustive grid", "[optimizers]") {
    const Objective obj = sphere_at({0.37, 0.81});
    const SearchSpace s = unit_box(2);
    GridResult g = grid_search(as_cell_fn(obj), s, {16, 16});  // 256 cells
    OptConfig cfg;
    cfg.max_evaluations = 256;  // matched budget
    OptResult h = hooke_jeeves(obj, s, cfg);
    const double band = g.best_loss() + 0.05 * (g.worst_loss() - g.best_loss());
    CHECK(h.best_loss <= band);
}

TEST_CASE("grid best subsets are ordered and sized", "[optimizers]") {
    const SearchSpace s = unit_box(2);
    GridResult g = grid_search(as_cell_fn(sphere_at({0.0, 0.0})), s, {5, 5});
    const auto top20 = g.best_n(20);
    CHECK(top20.size() == 20);
    const auto top = g.best_n(500);
    CHECK(top.size() == 25);
    const auto fifth = g.best_fraction(0.2);
    CHECK(fifth.size() == 5);
    for (std::size_t i = 1; i < fifth.size(); ++i)
        CHECK(g.cells[fifth[i - 1]].loss <= g.cells[fifth[i]].loss);
    CHECK(g.cells[top20[0]].loss == g.best_loss());
}
