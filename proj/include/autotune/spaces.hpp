#pragma once

#include <cmath>

#include "autotune/dataset.hpp"
#include "autotune/errors.hpp"
#include "autotune/learners.hpp"
#include "autotune/search_space.hpp"

namespace autotune {

/// Curated tuning spaces per (family, task): bounds, scales, and search start
/// locations. Cost and gamma are searched in log2 scale; tree counts, depths,
/// and node sizes are integers. Adaboost has no regression space.
inline SearchSpace registry_space(Family family, Task task) {
    SearchSpace s;
    switch (family) {
        case Family::svm:
            if (task == Task::classification) {
                s.dims = {
                    {"cost", 1.0, 1024.0, Scale::log2, false, 10.0},
                    {"gamma", std::exp2(-10.0), std::exp2(10.0), Scale::log2, false,
                     std::exp2(-5.0)},
                };
            } else {
                s.dims = {
                    {"cost", 1.0, 1024.0, Scale::log2, false, 2.0},
                    {"gamma", std::exp2(-10.0), 1.0, Scale::log2, false, std::exp2(-5.0)},
                    {"epsilon", 0.0, 0.5, Scale::linear, false, 0.4},
                };
            }
            break;
        case Family::gbm:
            if (task == Task::classification) {
                s.dims = {
                    {"trees", 50.0, 3000.0, Scale::linear, true, 500.0},
                    {"depth", 1.0, 15.0, Scale::linear, true, 5.0},
                    {"shrinkage", 0.001, 0.1, Scale::linear, false, 0.1},
                    {"min_obs", 5.0, 12.0, Scale::linear, true, 8.0},
                };
            } else {
                s.dims = {
                    {"trees", 50.0, 5000.0, Scale::linear, true, 2000.0},
                    {"depth", 1.0, 15.0, Scale::linear, true, 8.0},
                    {"shrinkage", 0.001, 0.1, Scale::linear, false, 0.1},
                    {"min_obs", 5.0, 10.0, Scale::linear, true, 5.0},
                };
            }
            break;
        case Family::ada:
            if (task != Task::classification)
                throw InfeasibleError("no tuning space: adaboost does not support regression");
            s.dims = {
                {"trees", 50.0, 500.0, Scale::linear, true, 300.0},
                {"depth", 1.0, 10.0, Scale::linear, true, 10.0},
                {"shrinkage", 0.01, 0.5, Scale::linear, false, 0.05},
            };
            break;
    }
    s.validate();
    return s;
}

}  // namespace autotune
