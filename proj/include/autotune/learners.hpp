#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "autotune/adaboost.hpp"
#include "autotune/dataset.hpp"
#include "autotune/errors.hpp"
#include "autotune/gbm.hpp"
#include "autotune/svm.hpp"

namespace autotune {

enum class Family { svm, gbm, ada };

inline std::string to_string(Family f) {
    switch (f) {
        case Family::svm: return "svm";
        case Family::gbm: return "gbm";
        case Family::ada: return "ada";
    }
    return "?";
}

inline Family parse_family(const std::string& s) {
    if (s == "svm") return Family::svm;
    if (s == "gbm") return Family::gbm;
    if (s == "ada") return Family::ada;
    throw DataError("unknown model family: " + s);
}

using ModelVariant = std::variant<SvmModel, GbmModel, AdaModel>;

/// Parameter vectors follow the registry dimension order:
///   svm classification: [cost, gamma]
///   svm regression:     [cost, gamma, epsilon]
///   gbm:                [trees, depth, shrinkage, min_obs]
///   ada:                [trees, depth, shrinkage]
inline ModelVariant fit_model(const Dataset& ds, Family family,
                              const std::vector<double>& params) {
    switch (family) {
        case Family::svm:
            if (ds.task == Task::classification) {
                if (params.size() != 2) throw InfeasibleError("svm classification expects 2 parameters");
                return fit_svc(ds, params[0], params[1]);
            } else {
                if (params.size() != 3) throw InfeasibleError("svm regression expects 3 parameters");
                return fit_svr(ds, params[0], params[1], params[2]);
            }
        case Family::gbm: {
            if (params.size() != 4) throw InfeasibleError("gbm expects 4 parameters");
            GbmParams p;
            p.n_trees = static_cast<int>(std::llround(params[0]));
            p.interaction_depth = static_cast<int>(std::llround(params[1]));
            p.shrinkage = params[2];
            p.min_obs_node = static_cast<int>(std::llround(params[3]));
            return fit_gbm(ds, p);
        }
        case Family::ada: {
            if (params.size() != 3) throw InfeasibleError("ada expects 3 parameters");
            if (ds.task != Task::classification)
                throw InfeasibleError("adaboost does not support regression");
            AdaParams p;
            p.n_trees = static_cast<int>(std::llround(params[0]));
            p.depth = static_cast<int>(std::llround(params[1]));
            p.shrinkage = params[2];
            return fit_adaboost(ds, p);
        }
    }
    throw InfeasibleError("unknown family");
}

inline std::vector<double> predict_model(const ModelVariant& model, const Matrix& rows) {
    return std::visit([&](const auto& m) { return m.predict(rows); }, model);
}

}  // namespace autotune
