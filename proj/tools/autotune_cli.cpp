// autotune: batch hyperparameter tuning for SVM / GBM / adaboost models.
//
// Subcommands: synth, tune, verify, grid-surface, benchmark, replay.
// JSON goes to stdout, diagnostics to stderr; files are written only through
// explicit --out/--save-model paths. Every command records a run manifest; a
// manifest can be replayed to reproduce all non-timing output.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "autotune/autotune.hpp"
#include "autotune/io.hpp"

namespace {

using autotune::json;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitResourceCap = 5;

std::string iso_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Resolved options of one run, in replayable form.
struct Manifest {
    std::string command;
    std::map<std::string, std::string> options;
    std::vector<std::uint64_t> seeds;
    std::string started_at = iso_now();

    json to_json() const {
        json j;
        j["command"] = command;
        j["options"] = options;
        j["seeds"] = seeds;
        j["tool_version"] = AUTOTUNE_VERSION;
        j["started_at"] = started_at;
        j["finished_at"] = iso_now();
        return j;
    }

    void write_alongside(const std::string& artifact_path) const {
        std::ofstream out(artifact_path + ".manifest.json", std::ios::binary);
        if (!out) throw autotune::DataError("cannot write manifest for " + artifact_path);
        out << to_json().dump(2) << '\n';
    }
};

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("AUTOTUNE_SEED")) return std::strtoull(env, nullptr, 10);
    return 42;
}

autotune::Task parse_task(const std::string& s) {
    if (s == "bin" || s == "classification") return autotune::Task::classification;
    if (s == "reg" || s == "regression") return autotune::Task::regression;
    throw CLI::ValidationError("--task", "expected bin or reg");
}

struct SchemeFlags {
    std::optional<int> cv;
    std::string fast;  // "true", fraction, or row count
    bool resub = false;

    autotune::EvalScheme resolve(const autotune::Dataset& ds, std::uint64_t seed) const {
        using autotune::EvalScheme;
        const int chosen = (cv ? 1 : 0) + (fast.empty() ? 0 : 1) + (resub ? 1 : 0);
        if (chosen > 1)
            throw CLI::ValidationError("scheme", "--cv, --fast and --resub are exclusive");
        if (resub) return EvalScheme::resub(seed);
        if (cv) return EvalScheme::cv(*cv, seed);
        if (!fast.empty()) {
            if (fast == "true" || fast == "TRUE") return EvalScheme::fast_fraction(0.5, seed);
            char* end = nullptr;
            const double v = std::strtod(fast.c_str(), &end);
            if (end == fast.c_str() || *end != '\0')
                throw CLI::ValidationError("--fast", "expected true, a fraction, or a row count");
            if (v > 0.0 && v < 1.0) return EvalScheme::fast_fraction(v, seed);
            if (v > 1.0 && v == std::floor(v))
                return EvalScheme::fast_n(static_cast<long>(v), seed);
            throw CLI::ValidationError("--fast", "expected true, a fraction in (0,1), or n > 1");
        }
        return autotune::default_scheme(ds, seed);
    }

    std::string describe_flag() const {
        if (resub) return "resub";
        if (cv) return "cv=" + std::to_string(*cv);
        if (!fast.empty()) return "fast=" + fast;
        return "auto";
    }
};

autotune::Dataset load_encoded(const std::string& path, const std::string& response,
                               autotune::Task task) {
    autotune::Dataset ds = autotune::encode(autotune::load_csv(path, response, task));
    for (const auto& w : ds.warnings) std::cerr << "warning: " << w << '\n';
    return ds;
}

std::vector<int> parse_points(const std::string& csv) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t comma = csv.find(',', pos);
        const std::string tok = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--points", "expected comma-separated integers");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

/// Family + canonical parameter vector recovered from a fitted model, used to
/// refit during verification.
std::pair<autotune::Family, std::vector<double>> params_of(const autotune::ModelVariant& model) {
    using namespace autotune;
    if (const auto* svm = std::get_if<SvmModel>(&model)) {
        if (svm->task == Task::classification)
            return {Family::svm, {svm->cost, svm->gamma}};
        return {Family::svm, {svm->cost, svm->gamma, svm->epsilon}};
    }
    if (const auto* gbm = std::get_if<GbmModel>(&model))
        return {Family::gbm,
                {static_cast<double>(gbm->n_trees), static_cast<double>(gbm->interaction_depth),
                 gbm->shrinkage, static_cast<double>(gbm->min_obs_node)}};
    const auto& ada = std::get<AdaModel>(model);
    return {Family::ada,
            {static_cast<double>(ada.n_trees), static_cast<double>(ada.depth), ada.shrinkage}};
}

// ---------------------------------------------------------------------------
// command payloads

struct CommonData {
    std::string data;
    std::string response;
    std::string task = "bin";
    std::string model = "svm";
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    SchemeFlags scheme;
};

void add_data_options(CLI::App* cmd, CommonData& o, bool need_model = true) {
    cmd->add_option("--data", o.data, "input CSV")->required();
    cmd->add_option("--response", o.response, "response column name or index")->required();
    cmd->add_option("--task", o.task, "bin or reg")->required();
    if (need_model) cmd->add_option("--model", o.model, "svm, gbm, or ada")->required();
    cmd->add_option("--seed", o.seed, "seed (default: AUTOTUNE_SEED env or 42)");
    cmd->add_option("--jobs", o.jobs, "max concurrent fold/cell evaluations")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cv", o.scheme.cv, "k-fold cross-validation");
    cmd->add_option("--fast", o.scheme.fast, "fast scheme: true, fraction, or train rows");
    cmd->add_flag("--resub", o.scheme.resub, "resubstitution scoring");
}

void common_manifest(Manifest& m, const CommonData& o, std::uint64_t seed) {
    m.options["data"] = o.data;
    m.options["response"] = o.response;
    m.options["task"] = o.task;
    m.options["model"] = o.model;
    m.options["seed"] = std::to_string(seed);
    m.options["jobs"] = std::to_string(o.jobs);
    if (o.scheme.resub) m.options["resub"] = "true";
    if (o.scheme.cv) m.options["cv"] = std::to_string(*o.scheme.cv);
    if (!o.scheme.fast.empty()) m.options["fast"] = o.scheme.fast;
    m.seeds = {seed};
}

int run_tune(const CommonData& o, const std::string& opt_name, int max_evals,
             const std::string& save_model_path) {
    using namespace autotune;
    Manifest manifest;
    manifest.command = "tune";
    const std::uint64_t seed = resolve_seed(o.seed);
    common_manifest(manifest, o, seed);
    manifest.options["opt"] = opt_name;
    manifest.options["max-evals"] = std::to_string(max_evals);
    if (!save_model_path.empty()) manifest.options["save-model"] = save_model_path;

    Dataset ds = load_encoded(o.data, o.response, parse_task(o.task));
    TuneRequest req;
    req.family = parse_family(o.model);
    req.optimizer = parse_optimizer(opt_name);
    req.scheme = o.scheme.resolve(ds, seed);
    req.seed = seed;
    req.jobs = o.jobs;
    req.opt_config.max_evaluations = max_evals;

    const TuneResult result = tune(ds, req);
    json out = to_json(result);
    out["seed"] = seed;
    out["data"] = o.data;
    if (!save_model_path.empty()) {
        save_model(result.model, save_model_path);
        manifest.write_alongside(save_model_path);
        out["model_file"] = save_model_path;
    }
    out["manifest"] = manifest.to_json();
    std::cout << out.dump(2) << '\n';
    return 0;
}

int run_verify(const CommonData& o, const std::string& model_file, int k) {
    using namespace autotune;
    Manifest manifest;
    manifest.command = "verify";
    const std::uint64_t seed = resolve_seed(o.seed);
    common_manifest(manifest, o, seed);
    manifest.options.erase("model");
    manifest.options["model-file"] = model_file;
    manifest.options["k"] = std::to_string(k);

    Dataset ds = load_encoded(o.data, o.response, parse_task(o.task));
    const ModelVariant model = load_model(model_file);
    const auto [family, params] = params_of(model);
    const CvResult r = evaluate(ds, family, params, EvalScheme::cv(k, seed), o.jobs);

    json out = to_json(r);
    out["family"] = to_string(family);
    out["k"] = k;
    out["seed"] = seed;
    out["manifest"] = manifest.to_json();
    std::cout << out.dump(2) << '\n';
    return 0;
}

int run_grid_surface(const CommonData& o, const std::string& points_csv, const std::string& out_path,
                     std::size_t cell_cap) {
    using namespace autotune;
    Manifest manifest;
    manifest.command = "grid-surface";
    const std::uint64_t seed = resolve_seed(o.seed);
    common_manifest(manifest, o, seed);
    manifest.options["points"] = points_csv;
    manifest.options["out"] = out_path;
    manifest.options["cap"] = std::to_string(cell_cap);

    Dataset ds = load_encoded(o.data, o.response, parse_task(o.task));
    const Family family = parse_family(o.model);
    const SearchSpace space = registry_space(family, ds.task);
    const std::vector<int> points = parse_points(points_csv);
    const EvalScheme scheme = o.scheme.resolve(ds, seed);

    const GridResult grid = run_grid(ds, family, scheme, points, cell_cap, o.jobs);

    std::ofstream csv(out_path, std::ios::binary);
    if (!csv) throw DataError("cannot write file: " + out_path);
    for (const auto& d : space.dims) csv << d.name << ',';
    csv << "loss,ucl95,seconds\n";
    for (const auto& cell : grid.cells) {
        for (double v : cell.point) csv << autotune::detail::format_double(v) << ',';
        csv << autotune::detail::format_double(cell.loss) << ','
            << autotune::detail::format_double(cell.ucl95) << ','
            << autotune::detail::format_double(cell.seconds) << '\n';
    }
    csv.close();
    manifest.write_alongside(out_path);

    json summary;
    summary["cells"] = grid.cells.size();
    summary["csv"] = out_path;
    summary["scheme"] = to_json(scheme);
    {
        json best;
        for (std::size_t i = 0; i < space.dims.size(); ++i)
            best[space.dims[i].name] = grid.best().point[i];
        summary["best"] = {{"point", best}, {"loss", grid.best_loss()},
                           {"index", grid.best_index}};
    }
    summary["worst_loss"] = grid.worst_loss();
    summary["best_20pct_indices"] = grid.best_fraction(0.2);
    summary["best_20_indices"] = grid.best_n(20);
    summary["manifest"] = manifest.to_json();
    std::cout << summary.dump(2) << '\n';
    return 0;
}

int run_benchmark(const CommonData& o, const std::string& opt_name, int reps,
                  const std::string& grid_points_csv, int max_evals, const std::string& out_path,
                  std::size_t cell_cap) {
    using namespace autotune;
    Manifest manifest;
    manifest.command = "benchmark";
    const std::uint64_t seed = resolve_seed(o.seed);
    common_manifest(manifest, o, seed);
    manifest.options["opt"] = opt_name;
    manifest.options["reps"] = std::to_string(reps);
    manifest.options["grid-points"] = grid_points_csv;
    manifest.options["max-evals"] = std::to_string(max_evals);
    manifest.options["cap"] = std::to_string(cell_cap);
    if (!out_path.empty()) manifest.options["out"] = out_path;

    Dataset ds = load_encoded(o.data, o.response, parse_task(o.task));
    const Family family = parse_family(o.model);
    const SearchSpace space = registry_space(family, ds.task);
    const std::vector<int> grid_points = parse_points(grid_points_csv);

    std::vector<TuneRequest> requests;
    std::vector<std::string> optimizers;
    if (opt_name == "both") {
        optimizers = {"hjn", "ga"};
    } else {
        optimizers = {opt_name};
    }
    for (const auto& name : optimizers) {
        TuneRequest req;
        req.family = family;
        req.optimizer = parse_optimizer(name);
        req.scheme = o.scheme.resolve(ds, seed);
        req.seed = seed;
        req.opt_config.max_evaluations = max_evals;
        requests.push_back(req);
    }

    const BenchReport report = benchmark(ds, requests, grid_points, reps, 10, cell_cap, o.jobs);

    if (!out_path.empty()) {
        std::ofstream csv(out_path, std::ios::binary);
        if (!csv) throw DataError("cannot write file: " + out_path);
        csv << "family,optimizer,scheme,rep,seed,";
        for (const auto& d : space.dims) csv << "param." << d.name << ',';
        csv << "verified_loss,seconds,standardized_loss,standardized_time,failed\n";
        for (const auto& rr : report.requests)
            for (const auto& rep : rr.repetitions) {
                csv << to_string(report.family) << ',' << to_string(rr.request.optimizer) << ','
                    << rr.request.scheme.describe() << ',' << rep.rep << ',' << rep.seed << ',';
                for (const auto& d : space.dims) {
                    if (rep.best_params.count(d.name))
                        csv << autotune::detail::format_double(rep.best_params.at(d.name));
                    csv << ',';
                }
                csv << autotune::detail::format_double(rep.verified_loss) << ','
                    << autotune::detail::format_double(rep.seconds) << ','
                    << autotune::detail::format_double(rep.standardized_loss) << ','
                    << autotune::detail::format_double(rep.standardized_time) << ','
                    << (rep.failed ? "true" : "false") << '\n';
            }
        csv.close();
        manifest.write_alongside(out_path);
    }

    json out = to_json(report, space.names());
    if (!out_path.empty()) out["csv"] = out_path;
    out["manifest"] = manifest.to_json();
    std::cout << out.dump(2) << '\n';
    return 0;
}

int run_synth(const std::string& kind, long n, double noise, std::optional<std::uint64_t> seed_flag,
              const std::string& out_path) {
    using namespace autotune;
    Manifest manifest;
    manifest.command = "synth";
    const std::uint64_t seed = resolve_seed(seed_flag);
    manifest.options = {{"kind", kind},
                        {"n", std::to_string(n)},
                        {"noise", autotune::detail::format_double(noise)},
                        {"seed", std::to_string(seed)},
                        {"out", out_path}};
    manifest.seeds = {seed};

    if (n < 20) throw InfeasibleError("synth: --n must be >= 20");
    Dataset ds = make_synthetic(parse_synthetic_kind(kind), static_cast<std::size_t>(n), noise,
                                seed);
    write_csv(ds, out_path);
    manifest.write_alongside(out_path);

    json out;
    out["rows"] = ds.rows();
    out["columns"] = ds.features.cols() + 1;
    out["task"] = to_string(ds.task);
    out["file"] = out_path;
    out["manifest"] = manifest.to_json();
    std::cout << out.dump(2) << '\n';
    return 0;
}

int dispatch(std::vector<std::string> args);

int run_replay(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw autotune::DataError("cannot open manifest: " + manifest_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw autotune::DataError(manifest_path + ": invalid JSON: " + std::string(e.what()));
    }
    if (!j.contains("command") || !j.contains("options"))
        throw autotune::DataError(manifest_path + ": not a run manifest");

    std::vector<std::string> args;
    args.push_back(j.at("command").get<std::string>());
    for (const auto& [key, value] : j.at("options").items()) {
        if (value == "true" && (key == "resub")) {
            args.push_back("--" + key);
        } else {
            args.push_back("--" + key);
            args.push_back(value.get<std::string>());
        }
    }
    return dispatch(std::move(args));
}

int dispatch(std::vector<std::string> args) {
    CLI::App app{"autotune: automatic hyperparameter tuning for SVM, GBM, and adaboost"};
    app.require_subcommand(1);
    app.set_version_flag("--version", AUTOTUNE_VERSION);

    // tune
    CommonData tune_data;
    std::string tune_opt = "hjn";
    int tune_max_evals = 1000;
    std::string tune_save;
    auto* tune_cmd = app.add_subcommand("tune", "search the tuning space and fit the winner");
    add_data_options(tune_cmd, tune_data);
    tune_cmd->add_option("--opt", tune_opt, "optimizer: hjn or ga (default hjn)");
    tune_cmd->add_option("--max-evals", tune_max_evals, "objective evaluation budget");
    tune_cmd->add_option("--save-model", tune_save, "write the fitted model JSON here");

    // verify
    CommonData verify_data;
    std::string verify_model;
    int verify_k = 10;
    auto* verify_cmd = app.add_subcommand("verify", "cross-validate a saved model's parameters");
    add_data_options(verify_cmd, verify_data, /*need_model=*/false);
    verify_cmd->add_option("--model-file", verify_model, "model JSON from tune --save-model")
        ->required();
    verify_cmd->add_option("--k", verify_k, "verification folds");

    // grid-surface
    CommonData grid_data;
    std::string grid_points_opt, grid_out;
    std::size_t grid_cap = 100000;
    auto* grid_cmd = app.add_subcommand("grid-surface", "exhaustive lattice over the tuning space");
    add_data_options(grid_cmd, grid_data);
    grid_cmd->add_option("--points", grid_points_opt, "lattice points per dimension, e.g. 9,9")
        ->required();
    grid_cmd->add_option("--out", grid_out, "surface CSV path")->required();
    grid_cmd->add_option("--cap", grid_cap, "cell cap");

    // benchmark
    CommonData bench_data;
    std::string bench_opt = "both";
    std::string bench_grid_points, bench_out;
    int bench_reps = 10, bench_max_evals = 1000;
    std::size_t bench_cap = 100000;
    auto* bench_cmd =
        app.add_subcommand("benchmark", "repeat tuning runs against a grid-search oracle");
    add_data_options(bench_cmd, bench_data);
    bench_cmd->add_option("--opt", bench_opt, "hjn, ga, or both (default both)");
    bench_cmd->add_option("--reps", bench_reps, "repetitions per request (default 10)");
    bench_cmd->add_option("--grid-points", bench_grid_points, "oracle lattice, e.g. 5,5")
        ->required();
    bench_cmd->add_option("--max-evals", bench_max_evals, "objective budget per run");
    bench_cmd->add_option("--out", bench_out, "per-repetition CSV path");
    bench_cmd->add_option("--cap", bench_cap, "cell cap");

    // synth
    std::string synth_kind, synth_out;
    long synth_n = 200;
    double synth_noise = 0.0;
    std::optional<std::uint64_t> synth_seed;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset CSV");
    synth_cmd->add_option("--kind", synth_kind, "two-gaussians or friedman1")->required();
    synth_cmd->add_option("--n", synth_n, "rows (>= 20)");
    synth_cmd->add_option("--noise", synth_noise, "noise level (>= 0)");
    synth_cmd->add_option("--seed", synth_seed, "seed");
    synth_cmd->add_option("--out", synth_out, "output CSV path")->required();

    // replay
    std::string replay_path;
    auto* replay_cmd = app.add_subcommand("replay", "re-run a recorded manifest");
    replay_cmd->add_option("--manifest", replay_path, "manifest JSON path")->required();

    std::vector<const char*> argv;
    argv.push_back("autotune");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints help/message
        return e.get_exit_code() == 0 ? 0 : kExitUsage;
    }

    if (tune_cmd->parsed()) return run_tune(tune_data, tune_opt, tune_max_evals, tune_save);
    if (verify_cmd->parsed()) return run_verify(verify_data, verify_model, verify_k);
    if (grid_cmd->parsed()) return run_grid_surface(grid_data, grid_points_opt, grid_out, grid_cap);
    if (bench_cmd->parsed())
        return run_benchmark(bench_data, bench_opt, bench_reps, bench_grid_points,
                             bench_max_evals, bench_out, bench_cap);
    if (synth_cmd->parsed())
        return run_synth(synth_kind, synth_n, synth_noise, synth_seed, synth_out);
    if (replay_cmd->parsed()) return run_replay(replay_path);
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return dispatch(std::move(args));
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const autotune::ResourceCapError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitResourceCap;
    } catch (const autotune::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const autotune::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}
