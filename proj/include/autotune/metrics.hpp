#pragma once

#include <span>

#include "autotune/errors.hpp"

namespace autotune {

/// Fraction of mismatched labels.
inline double misclassification_rate(std::span<const double> predicted,
                                     std::span<const double> actual) {
    if (predicted.size() != actual.size() || predicted.empty())
        throw DataError("misclassification_rate: length mismatch");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) wrong += predicted[i] != actual[i];
    return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

/// Mean squared error.
inline double mse(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size() || predicted.empty())
        throw DataError("mse: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - actual[i];
        s += d * d;
    }
    return s / static_cast<double>(predicted.size());
}

}  // namespace autotune
