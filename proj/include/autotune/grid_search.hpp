#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <vector>

#include "autotune/errors.hpp"
#include "autotune/optimizer_types.hpp"
#include "autotune/parallel.hpp"
#include "autotune/search_space.hpp"

namespace autotune {

struct CellScore {
    double loss = 0.0;
    double ucl95 = 0.0;
    double seconds = 0.0;
};

/// Rich objective used by the grid: loss plus the extras the surface CSV
/// carries.
using CellFn = std::function<CellScore(const std::vector<double>&)>;

struct GridCell {
    std::vector<double> point;  // natural units
    double loss = 0.0;
    double ucl95 = 0.0;
    double seconds = 0.0;
};

struct GridResult {
    std::vector<GridCell> cells;      // full lattice, enumeration order
    std::size_t best_index = 0;

    const GridCell& best() const { return cells[best_index]; }

    double best_loss() const { return cells[best_index].loss; }
    double worst_loss() const {
        double w = cells[0].loss;
        for (const auto& c : cells) w = std::max(w, c.loss);
        return w;
    }
    double best_seconds() const {
        double b = cells[0].seconds;
        for (const auto& c : cells) b = std::min(b, c.seconds);
        return b;
    }
    double worst_seconds() const {
        double w = cells[0].seconds;
        for (const auto& c : cells) w = std::max(w, c.seconds);
        return w;
    }

    /// Cell indices sorted by loss ascending, earlier cells first on ties.
    std::vector<std::size_t> indices_by_loss() const {
        std::vector<std::size_t> idx(cells.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return cells[a].loss < cells[b].loss;
        });
        return idx;
    }

    /// The best ceil(frac * cells) cells by loss.
    std::vector<std::size_t> best_fraction(double frac) const {
        auto idx = indices_by_loss();
        const std::size_t keep = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(frac * static_cast<double>(cells.size()))));
        idx.resize(std::min(keep, idx.size()));
        return idx;
    }

    std::vector<std::size_t> best_n(std::size_t n) const {
        auto idx = indices_by_loss();
        idx.resize(std::min(n, idx.size()));
        return idx;
    }
};

/// Lattice values for one dimension: evenly spaced in natural units for
/// linear dims and in log2 space for log2 dims; integer dims keep the
/// distinct rounded values. A single-point request lands mid-range.
inline std::vector<double> grid_levels(const SearchSpace::Dim& dim, int points) {
    if (points < 1) throw InfeasibleError("grid_search: points per dim must be >= 1");
    std::vector<double> out;
    auto value_at = [&](double t) {  // t in [0,1]
        double v;
        if (dim.scale == Scale::log2) {
            const double llo = std::log2(dim.lower), lhi = std::log2(dim.upper);
            v = std::exp2(llo + t * (lhi - llo));
        } else {
            v = dim.lower + t * (dim.upper - dim.lower);
        }
        if (dim.integer) v = std::round(v);
        return std::clamp(v, dim.lower, dim.upper);
    };
    if (points == 1) {
        out.push_back(value_at(0.5));
        return out;
    }
    for (int i = 0; i < points; ++i) {
        const double v = value_at(static_cast<double>(i) / (points - 1));
        if (out.empty() || v != out.back()) out.push_back(v);  // dedupe rounded integers
    }
    return out;
}

/// Exhaustive Cartesian lattice evaluation. Cells are enumerated with the
/// first dimension slowest; evaluation may run on several threads, but the
/// stored order and the best-cell tie-break (first evaluated wins) do not
/// depend on the thread count.
inline GridResult grid_search(const CellFn& cell_fn, const SearchSpace& space,
                              const std::vector<int>& points_per_dim,
                              std::size_t cell_cap = 100000, int jobs = 1) {
    space.validate();
    if (points_per_dim.size() != space.size())
        throw InfeasibleError("grid_search: points_per_dim size differs from space dimensions");

    std::vector<std::vector<double>> levels;
    std::size_t total = 1;
    for (std::size_t i = 0; i < space.size(); ++i) {
        levels.push_back(grid_levels(space.dims[i], points_per_dim[i]));
        total *= levels.back().size();
        if (total > cell_cap)
            throw ResourceCapError("grid_search: lattice exceeds the cell cap of " +
                                   std::to_string(cell_cap));
    }

    GridResult result;
    result.cells.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        std::vector<double> point(space.size());
        for (std::size_t i = space.size(); i-- > 0;) {
            const auto& lv = levels[i];
            point[i] = lv[rem % lv.size()];
            rem /= lv.size();
        }
        result.cells[idx].point = std::move(point);
    }

    parallel_for(total, jobs, [&](std::size_t idx) {
        auto& cell = result.cells[idx];
        const auto t0 = std::chrono::steady_clock::now();
        const CellScore score = cell_fn(cell.point);
        cell.loss = score.loss;
        cell.ucl95 = score.ucl95;
        cell.seconds = score.seconds > 0.0
                           ? score.seconds
                           : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                 .count();
    });

    result.best_index = 0;
    for (std::size_t idx = 1; idx < total; ++idx)
        if (result.cells[idx].loss < result.cells[result.best_index].loss)
            result.best_index = idx;
    return result;
}

/// Adapts a plain objective for grid use (ucl collapses onto the loss).
inline CellFn as_cell_fn(Objective objective) {
    return [objective = std::move(objective)](const std::vector<double>& p) {
        CellScore s;
        s.loss = objective(p);
        s.ucl95 = s.loss;
        return s;
    };
}

}  // namespace autotune
