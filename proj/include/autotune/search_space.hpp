#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "autotune/errors.hpp"

namespace autotune {

enum class Scale { linear, log2 };

/// Bounded tuning space: one entry per parameter, with bounds, scale,
/// integrality, and the search start location.
struct SearchSpace {
    struct Dim {
        std::string name;
        double lower = 0.0;
        double upper = 1.0;
        Scale scale = Scale::linear;
        bool integer = false;
        double start = 0.0;
    };

    std::vector<Dim> dims;

    std::size_t size() const { return dims.size(); }

    void validate() const {
        if (dims.empty()) throw InfeasibleError("SearchSpace: no dimensions");
        for (const auto& d : dims) {
            if (!(d.lower < d.upper))
                throw InfeasibleError("SearchSpace: lower must be < upper for " + d.name);
            if (d.start < d.lower || d.start > d.upper)
                throw InfeasibleError("SearchSpace: start out of bounds for " + d.name);
            if (d.scale == Scale::log2 && !(d.lower > 0.0))
                throw InfeasibleError("SearchSpace: log2 scale needs lower > 0 for " + d.name);
            if (d.integer &&
                (d.lower != std::floor(d.lower) || d.upper != std::floor(d.upper) ||
                 d.start != std::floor(d.start)))
                throw InfeasibleError("SearchSpace: integer dim has non-integer bounds for " +
                                      d.name);
        }
    }

    std::vector<double> start_point() const {
        std::vector<double> p;
        p.reserve(dims.size());
        for (const auto& d : dims) p.push_back(d.start);
        return p;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(dims.size());
        for (const auto& d : dims) out.push_back(d.name);
        return out;
    }

    bool contains(const std::vector<double>& point) const {
        if (point.size() != dims.size()) return false;
        for (std::size_t i = 0; i < dims.size(); ++i)
            if (point[i] < dims[i].lower || point[i] > dims[i].upper) return false;
        return true;
    }
};

/// Maps a natural-unit point onto [0,1]^d: affine for linear dims, affine in
/// log2 space for log2 dims.
inline std::vector<double> to_unit(const std::vector<double>& point, const SearchSpace& space) {
    if (point.size() != space.dims.size()) throw InfeasibleError("to_unit: dimension mismatch");
    std::vector<double> u(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) {
        const auto& d = space.dims[i];
        if (point[i] < d.lower || point[i] > d.upper)
            throw InfeasibleError("to_unit: point out of bounds for " + d.name);
        if (d.scale == Scale::log2)
            u[i] = (std::log2(point[i]) - std::log2(d.lower)) /
                   (std::log2(d.upper) - std::log2(d.lower));
        else
            u[i] = (point[i] - d.lower) / (d.upper - d.lower);
    }
    return u;
}

/// Inverse of to_unit. Integer dims round to the nearest integer, so the map
/// is the identity only on representable points.
inline std::vector<double> from_unit(const std::vector<double>& unit, const SearchSpace& space) {
    if (unit.size() != space.dims.size()) throw InfeasibleError("from_unit: dimension mismatch");
    std::vector<double> p(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i) {
        const auto& d = space.dims[i];
        const double u = unit[i];
        if (u < -1e-12 || u > 1.0 + 1e-12)
            throw InfeasibleError("from_unit: unit coordinate out of [0,1] for " + d.name);
        double v;
        if (d.scale == Scale::log2) {
            const double llo = std::log2(d.lower), lhi = std::log2(d.upper);
            v = std::exp2(llo + u * (lhi - llo));
        } else {
            v = d.lower + u * (d.upper - d.lower);
        }
        if (d.integer) v = std::round(v);
        p[i] = std::clamp(v, d.lower, d.upper);
    }
    return p;
}

}  // namespace autotune
