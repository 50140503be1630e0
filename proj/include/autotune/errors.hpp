#pragma once

#include <stdexcept>
#include <string>

namespace autotune {

/// Malformed or unusable input data (CSV problems, bad columns, width mismatches).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Structurally valid request that cannot be satisfied (adaboost regression,
/// folds larger than the dataset, holdout with no rows left).
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A configured resource cap was exceeded (grid cell cap).
class ResourceCapError : public std::runtime_error {
public:
    explicit ResourceCapError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace autotune
