#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "autotune/errors.hpp"
#include "autotune/evaluation.hpp"
#include "autotune/grid_search.hpp"
#include "autotune/learners.hpp"
#include "autotune/tuner.hpp"
#include "autotune/version.hpp"

namespace autotune {

using json = nlohmann::json;

inline json to_json(const EvalScheme& s) {
    json j;
    j["kind"] = s.describe();
    j["seed"] = s.seed;
    return j;
}

inline json to_json(const CvResult& r) {
    json j;
    j["mean_loss"] = r.mean_loss;
    j["per_fold_losses"] = r.per_fold_losses;
    j["ucl95"] = r.ucl95;
    j["n_model_fits"] = r.n_model_fits;
    j["elapsed_seconds"] = r.elapsed_seconds;
    return j;
}

namespace detail {

inline json tree_to_json(const Tree& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes)
        nodes.push_back({n.col, n.threshold, n.left, n.right, n.value});
    return nodes;
}

inline Tree tree_from_json(const json& j) {
    Tree t;
    for (const auto& n : j) {
        TreeNode node;
        node.col = n.at(0).get<int>();
        node.threshold = n.at(1).get<double>();
        node.left = n.at(2).get<int>();
        node.right = n.at(3).get<int>();
        node.value = n.at(4).get<double>();
        t.nodes.push_back(node);
    }
    if (t.nodes.empty()) throw DataError("model document: empty tree");
    return t;
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j, std::size_t cols_hint) {
    const std::size_t rows = j.size();
    const std::size_t cols = rows ? j.at(0).size() : cols_hint;
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

}  // namespace detail

/// Versioned model document, the on-disk format behind --save-model.
inline json model_to_json(const ModelVariant& model) {
    json j;
    j["format"] = "autotune-model";
    j["version"] = 1;
    if (const auto* svm = std::get_if<SvmModel>(&model)) {
        j["family"] = "svm";
        j["task"] = to_string(svm->task);
        j["cost"] = svm->cost;
        j["gamma"] = svm->gamma;
        j["epsilon"] = svm->epsilon;
        j["bias"] = svm->bias;
        j["dual_coefs"] = svm->dual_coefs;
        j["support_vectors"] = detail::matrix_to_json(svm->support_vectors);
        j["scaling"] = {{"mean", svm->scaling.mean}, {"sd", svm->scaling.sd}};
    } else if (const auto* gbm = std::get_if<GbmModel>(&model)) {
        j["family"] = "gbm";
        j["task"] = to_string(gbm->task);
        j["init_value"] = gbm->init_value;
        j["shrinkage"] = gbm->shrinkage;
        j["n_trees"] = gbm->n_trees;
        j["interaction_depth"] = gbm->interaction_depth;
        j["min_obs_node"] = gbm->min_obs_node;
        j["loss"] = gbm->loss == GbmLoss::logistic ? "logistic" : "squared";
        json trees = json::array();
        for (const auto& t : gbm->trees) trees.push_back(detail::tree_to_json(t));
        j["trees"] = std::move(trees);
    } else {
        const auto& ada = std::get<AdaModel>(model);
        j["family"] = "ada";
        j["task"] = to_string(ada.task);
        j["shrinkage"] = ada.shrinkage;
        j["n_trees"] = ada.n_trees;
        j["depth"] = ada.depth;
        j["stage_weights"] = ada.stage_weights;
        json trees = json::array();
        for (const auto& t : ada.trees) trees.push_back(detail::tree_to_json(t));
        j["trees"] = std::move(trees);
    }
    return j;
}

inline ModelVariant model_from_json(const json& j) {
    if (j.value("format", "") != "autotune-model")
        throw DataError("not an autotune model document");
    if (j.value("version", 0) != 1)
        throw DataError("unsupported model document version");
    const std::string family = j.at("family").get<std::string>();
    const Task task =
        j.at("task").get<std::string>() == "classification" ? Task::classification
                                                            : Task::regression;
    if (family == "svm") {
        SvmModel m;
        m.task = task;
        m.cost = j.at("cost").get<double>();
        m.gamma = j.at("gamma").get<double>();
        m.epsilon = j.at("epsilon").get<double>();
        m.bias = j.at("bias").get<double>();
        m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
        m.scaling.mean = j.at("scaling").at("mean").get<std::vector<double>>();
        m.scaling.sd = j.at("scaling").at("sd").get<std::vector<double>>();
        m.support_vectors = detail::matrix_from_json(j.at("support_vectors"),
                                                     m.scaling.mean.size());
        return m;
    }
    if (family == "gbm") {
        GbmModel m;
        m.task = task;
        m.init_value = j.at("init_value").get<double>();
        m.shrinkage = j.at("shrinkage").get<double>();
        m.n_trees = j.at("n_trees").get<int>();
        m.interaction_depth = j.at("interaction_depth").get<int>();
        m.min_obs_node = j.at("min_obs_node").get<int>();
        m.loss = j.at("loss").get<std::string>() == "logistic" ? GbmLoss::logistic
                                                               : GbmLoss::squared;
        for (const auto& t : j.at("trees")) m.trees.push_back(detail::tree_from_json(t));
        return m;
    }
    if (family == "ada") {
        AdaModel m;
        m.task = task;
        m.shrinkage = j.at("shrinkage").get<double>();
        m.n_trees = j.at("n_trees").get<int>();
        m.depth = j.at("depth").get<int>();
        m.stage_weights = j.at("stage_weights").get<std::vector<double>>();
        for (const auto& t : j.at("trees")) m.trees.push_back(detail::tree_from_json(t));
        return m;
    }
    throw DataError("model document: unknown family '" + family + "'");
}

inline void save_model(const ModelVariant& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    out << model_to_json(model).dump(2) << '\n';
}

inline ModelVariant load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    return model_from_json(j);
}

inline json to_json(const TuneResult& r) {
    json j;
    j["family"] = to_string(r.family);
    j["task"] = to_string(r.task);
    j["optimizer"] = to_string(r.optimizer);
    j["best_params"] = r.best_params;
    j["search_loss"] = r.search_loss;
    j["evaluations_used"] = r.evaluations_used;
    j["elapsed_seconds"] = r.elapsed_seconds;
    j["scheme"] = to_json(r.scheme_used);
    return j;
}

inline json to_json(const BenchReport& report, const std::vector<std::string>& dim_names) {
    json j;
    j["family"] = to_string(report.family);
    j["grid"] = {{"points", report.grid_points},
                 {"scheme", to_json(report.grid_scheme)},
                 {"cells", report.grid.cells.size()},
                 {"best_loss", report.grid_best_loss},
                 {"worst_loss", report.grid_worst_loss},
                 {"standardized_loss", 0.0}};
    {
        json best_point = json::object();
        const auto& p = report.grid.best().point;
        for (std::size_t i = 0; i < p.size(); ++i) best_point[dim_names[i]] = p[i];
        j["grid"]["best_point"] = std::move(best_point);
    }
    j["verify_k"] = report.verify_k;
    json reqs = json::array();
    for (const auto& rr : report.requests) {
        json q;
        q["optimizer"] = to_string(rr.request.optimizer);
        q["scheme"] = to_json(rr.request.scheme);
        q["mean_verified_loss"] = rr.mean_verified_loss;
        q["mean_seconds"] = rr.mean_seconds;
        q["failures"] = rr.failures;
        json reps = json::array();
        for (const auto& rep : rr.repetitions) {
            json x;
            x["rep"] = rep.rep;
            x["seed"] = rep.seed;
            x["best_params"] = rep.best_params;
            x["verified_loss"] = rep.verified_loss;
            x["seconds"] = rep.seconds;
            x["standardized_loss"] = rep.standardized_loss;
            x["standardized_time"] = rep.standardized_time;
            x["failed"] = rep.failed;
            if (rep.failed) x["error"] = rep.error;
            reps.push_back(std::move(x));
        }
        q["repetitions"] = std::move(reps);
        reqs.push_back(std::move(q));
    }
    j["requests"] = std::move(reqs);
    return j;
}

/// Field names whose values depend on wall-clock measurement; determinism
/// comparisons drop them.
inline const std::vector<std::string>& timing_field_names() {
    static const std::vector<std::string> fields = {
        "elapsed_seconds", "seconds",     "mean_seconds",
        "standardized_time", "started_at", "finished_at"};
    return fields;
}

inline void scrub_timing_fields(json& j) {
    if (j.is_object()) {
        for (const auto& f : timing_field_names()) j.erase(f);
        for (auto& [k, v] : j.items()) scrub_timing_fields(v);
    } else if (j.is_array()) {
        for (auto& v : j) scrub_timing_fields(v);
    }
}

}  // namespace autotune
