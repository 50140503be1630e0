#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "autotune/errors.hpp"
#include "autotune/matrix.hpp"

namespace autotune {

enum class Task { classification, regression };

enum class ColumnKind { continuous, categorical };

inline std::string to_string(Task t) {
    return t == Task::classification ? "classification" : "regression";
}

/// Per-column mean/sd captured by standardize() so new rows can be
/// transformed exactly like the training rows.
struct ScalingParams {
    std::vector<double> mean;
    std::vector<double> sd;

    bool empty() const { return mean.empty(); }

    void apply(Matrix& m) const {
        if (m.cols() != mean.size())
            throw DataError("ScalingParams: column count mismatch");
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
                m(r, c) = (m(r, c) - mean[c]) / sd[c];
    }

    Matrix applied(Matrix m) const {
        apply(m);
        return m;
    }
};

/// One-hot encoder state: per original column, the sorted level list with the
/// first level dropped. Unseen levels at apply time map to an all-zero block.
struct Encoder {
    struct ColumnPlan {
        std::string name;
        ColumnKind kind = ColumnKind::continuous;
        std::vector<std::string> kept_levels;  // categorical only; first level dropped
        bool dropped = false;                  // single-level categorical
    };
    std::vector<ColumnPlan> columns;
};

struct FoldAssignment {
    std::vector<int> fold_of;  // fold index per row, in [0, k)
    int k = 0;
    std::uint64_t seed = 0;

    std::vector<int> rows_in_fold(int f) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < fold_of.size(); ++i)
            if (fold_of[i] == f) out.push_back(static_cast<int>(i));
        return out;
    }
    std::vector<int> rows_not_in_fold(int f) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < fold_of.size(); ++i)
            if (fold_of[i] != f) out.push_back(static_cast<int>(i));
        return out;
    }
};

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Tabular dataset. Loaded raw (string cells, columns tagged categorical or
/// continuous), then one-hot encoded into a dense numeric matrix. Immutable
/// by convention once encoded; all split operations return copies.
class Dataset {
public:
    struct RawColumn {
        std::string name;
        ColumnKind kind = ColumnKind::continuous;
        std::vector<std::string> cells;
    };

    std::string name;
    Task task = Task::regression;

    // raw (pre-encoding) view
    std::vector<RawColumn> raw_columns;

    // encoded view
    bool encoded = false;
    Matrix features;
    std::vector<std::string> feature_names;
    Encoder encoder;

    std::vector<double> response;
    std::vector<std::string> class_labels;  // classification: original labels, sorted; index = code
    std::vector<std::string> warnings;

    std::size_t rows() const {
        return encoded ? features.rows()
                       : (raw_columns.empty() ? response.size() : raw_columns.front().cells.size());
    }

    std::size_t n_positive() const {
        std::size_t c = 0;
        for (double y : response) c += (y == 1.0);
        return c;
    }

    void require_encoded() const {
        if (!encoded) throw DataError("dataset '" + name + "' is not encoded yet");
    }

    /// Row subset of an encoded dataset (fold construction, holdouts).
    Dataset subset(std::span<const int> indices) const {
        require_encoded();
        Dataset out;
        out.name = name;
        out.task = task;
        out.encoded = true;
        out.features = features.take_rows(indices);
        out.feature_names = feature_names;
        out.encoder = encoder;
        out.class_labels = class_labels;
        out.response.reserve(indices.size());
        for (int i : indices) out.response.push_back(response[static_cast<std::size_t>(i)]);
        return out;
    }
};

namespace detail {

/// Splits one CSV line into fields. Supports quoted fields with "" escapes.
inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\r') {
            // tolerate CRLF
        } else {
            cur += c;
        }
    }
    if (quoted)
        throw DataError("line " + std::to_string(line_no) + ": unterminated quoted field");
    fields.push_back(std::move(cur));
    return fields;
}

inline bool is_missing(const std::string& s) { return s.empty() || s == "NA"; }

}  // namespace detail

/// Loads a CSV (comma separated, header row, quoted fields allowed) into a raw
/// Dataset. The response column may be given by name or by 0-based index.
/// Classification responses must have exactly two distinct values; they are
/// mapped to {0,1} by sorted order (numeric sort when both values parse as
/// numbers, lexicographic otherwise). Missing values ("NA" or empty) are
/// errors, reported with their line number.
inline Dataset load_csv(const std::string& path, const std::string& response_column, Task task) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    const std::vector<std::string> header = detail::split_csv_line(line, 1);

    // resolve the response column: name first, then numeric index
    std::optional<std::size_t> resp_idx;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == response_column) resp_idx = i;
    if (!resp_idx) {
        int idx = -1;
        if (auto [p, ec] = std::from_chars(response_column.data(),
                                           response_column.data() + response_column.size(), idx);
            ec == std::errc() && p == response_column.data() + response_column.size() &&
            idx >= 0 && static_cast<std::size_t>(idx) < header.size())
            resp_idx = static_cast<std::size_t>(idx);
    }
    if (!resp_idx) throw DataError(path + ": response column '" + response_column + "' not found");

    std::vector<std::vector<std::string>> cells(header.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.eof()) break;
        const auto fields = detail::split_csv_line(line, line_no);
        if (fields.size() != header.size())
            throw DataError(path + ": line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (detail::is_missing(fields[i]))
                throw DataError(path + ": line " + std::to_string(line_no) +
                                ": missing value in column '" + header[i] + "'");
            cells[i].push_back(fields[i]);
        }
    }
    const std::size_t n = cells[*resp_idx].size();
    if (n < 2) throw DataError(path + ": needs at least 2 data rows");

    Dataset ds;
    ds.name = path;
    ds.task = task;

    // response
    const auto& resp_cells = cells[*resp_idx];
    std::set<std::string> distinct(resp_cells.begin(), resp_cells.end());
    if (distinct.size() < 2) throw DataError(path + ": response column is constant");
    if (task == Task::classification) {
        if (distinct.size() > 2)
            throw DataError(path + ": more than two classes in response (" +
                            std::to_string(distinct.size()) + ") for classification");
        std::vector<std::string> labels(distinct.begin(), distinct.end());
        double a, b;
        if (detail::parse_double(labels[0], a) && detail::parse_double(labels[1], b) && a > b)
            std::swap(labels[0], labels[1]);
        ds.class_labels = labels;
        ds.response.reserve(n);
        for (const auto& v : resp_cells) ds.response.push_back(v == labels[0] ? 0.0 : 1.0);
    } else {
        ds.response.reserve(n);
        for (std::size_t r = 0; r < n; ++r) {
            double v;
            if (!detail::parse_double(resp_cells[r], v))
                throw DataError(path + ": line " + std::to_string(r + 2) +
                                ": non-numeric response '" + resp_cells[r] + "'");
            ds.response.push_back(v);
        }
    }

    // predictors: numeric columns are continuous, anything else categorical
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i == *resp_idx) continue;
        Dataset::RawColumn col;
        col.name = header[i];
        col.cells = cells[i];
        col.kind = ColumnKind::continuous;
        for (const auto& v : col.cells) {
            double d;
            if (!detail::parse_double(v, d)) {
                col.kind = ColumnKind::categorical;
                break;
            }
        }
        ds.raw_columns.push_back(std::move(col));
    }
    if (ds.raw_columns.empty()) throw DataError(path + ": no predictor columns");
    return ds;
}

/// One-hot encodes categorical columns (c levels -> c-1 indicators, first
/// level in sorted order dropped); continuous columns pass through. Columns
/// with a single level are dropped with a warning record.
inline Dataset encode(const Dataset& ds) {
    if (ds.encoded) throw DataError("dataset already encoded");
    const std::size_t n = ds.rows();

    Dataset out;
    out.name = ds.name;
    out.task = ds.task;
    out.response = ds.response;
    out.class_labels = ds.class_labels;
    out.warnings = ds.warnings;
    out.encoded = true;

    std::vector<std::vector<double>> cols;  // column-major staging
    for (const auto& rc : ds.raw_columns) {
        Encoder::ColumnPlan plan;
        plan.name = rc.name;
        plan.kind = rc.kind;
        if (rc.kind == ColumnKind::continuous) {
            std::vector<double> v(n);
            for (std::size_t r = 0; r < n; ++r) detail::parse_double(rc.cells[r], v[r]);
            cols.push_back(std::move(v));
            out.feature_names.push_back(rc.name);
        } else {
            std::set<std::string> levels(rc.cells.begin(), rc.cells.end());
            if (levels.size() < 2) {
                plan.dropped = true;
                out.warnings.push_back("column '" + rc.name + "' has a single level; dropped");
                out.encoder.columns.push_back(std::move(plan));
                continue;
            }
            auto it = levels.begin();
            ++it;  // drop first level
            for (; it != levels.end(); ++it) {
                plan.kept_levels.push_back(*it);
                std::vector<double> v(n, 0.0);
                for (std::size_t r = 0; r < n; ++r)
                    if (rc.cells[r] == *it) v[r] = 1.0;
                cols.push_back(std::move(v));
                out.feature_names.push_back(rc.name + "=" + plan.kept_levels.back());
            }
        }
        out.encoder.columns.push_back(std::move(plan));
    }
    if (cols.empty()) throw DataError("no usable predictor columns after encoding");

    out.features = Matrix(n, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < n; ++r) out.features(r, c) = cols[c][r];
    return out;
}

/// Encodes a raw dataset with a previously fitted Encoder (prediction on new
/// data). Unseen categorical levels map to the all-zeros indicator block.
inline Matrix encode_with(const Encoder& enc, const Dataset& raw) {
    if (raw.encoded) throw DataError("encode_with expects a raw dataset");
    if (raw.raw_columns.size() != enc.columns.size())
        throw DataError("encode_with: column count differs from the fitted encoder");
    const std::size_t n = raw.rows();
    std::vector<std::vector<double>> cols;
    for (std::size_t ci = 0; ci < enc.columns.size(); ++ci) {
        const auto& plan = enc.columns[ci];
        const auto& rc = raw.raw_columns[ci];
        if (plan.dropped) continue;
        if (plan.kind == ColumnKind::continuous) {
            std::vector<double> v(n);
            for (std::size_t r = 0; r < n; ++r)
                if (!detail::parse_double(rc.cells[r], v[r]))
                    throw DataError("encode_with: non-numeric value in continuous column '" +
                                    rc.name + "'");
            cols.push_back(std::move(v));
        } else {
            for (const auto& level : plan.kept_levels) {
                std::vector<double> v(n, 0.0);
                for (std::size_t r = 0; r < n; ++r)
                    if (rc.cells[r] == level) v[r] = 1.0;
                cols.push_back(std::move(v));
            }
        }
    }
    Matrix m(n, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < n; ++r) m(r, c) = cols[c][r];
    return m;
}

/// Standardizes every column to mean 0 / sample sd 1 and records the
/// transform. Zero-variance columns are left as-is with sd recorded as 1.
inline std::pair<Dataset, ScalingParams> standardize(const Dataset& ds) {
    ds.require_encoded();
    const std::size_t n = ds.features.rows(), d = ds.features.cols();
    ScalingParams sp;
    sp.mean.resize(d);
    sp.sd.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < n; ++r) s += ds.features(r, c);
        const double m = s / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double dv = ds.features(r, c) - m;
            ss += dv * dv;
        }
        const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
        if (sd > 0.0) {
            sp.mean[c] = m;
            sp.sd[c] = sd;
        } else {
            sp.mean[c] = 0.0;
            sp.sd[c] = 1.0;
        }
    }
    Dataset out = ds;
    sp.apply(out.features);
    return {std::move(out), std::move(sp)};
}

namespace detail {

/// Deals shuffled indices round-robin into k folds. Applied per class for
/// stratified splits.
inline void deal_round_robin(std::vector<int>& indices, int k, std::mt19937_64& rng,
                             std::vector<int>& fold_of, int& next_fold) {
    std::shuffle(indices.begin(), indices.end(), rng);
    for (int idx : indices) {
        fold_of[static_cast<std::size_t>(idx)] = next_fold;
        next_fold = (next_fold + 1) % k;
    }
}

}  // namespace detail

/// Deterministic k-fold assignment. Stratified for classification (per-class
/// round robin), random-balanced for regression (fold sizes differ by <= 1).
/// For classification, k is reduced to the smallest class count when that
/// count is below k (with a minimum of 2).
inline FoldAssignment kfold(const Dataset& ds, int k, std::uint64_t seed) {
    const std::size_t n = ds.rows();
    if (k < 2) throw InfeasibleError("kfold: k must be >= 2");
    if (static_cast<std::size_t>(k) > n) throw InfeasibleError("kfold: k exceeds row count");

    FoldAssignment fa;
    fa.seed = seed;
    fa.fold_of.assign(n, -1);

    std::mt19937_64 rng(seed);
    if (ds.task == Task::classification) {
        std::vector<int> pos, neg;
        for (std::size_t i = 0; i < n; ++i)
            (ds.response[i] == 1.0 ? pos : neg).push_back(static_cast<int>(i));
        const std::size_t smallest = std::min(pos.size(), neg.size());
        if (smallest < static_cast<std::size_t>(k))
            k = std::max<int>(2, static_cast<int>(smallest));
        fa.k = k;
        int next = 0;
        detail::deal_round_robin(neg, k, rng, fa.fold_of, next);
        next = 0;
        detail::deal_round_robin(pos, k, rng, fa.fold_of, next);
    } else {
        fa.k = k;
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        int next = 0;
        detail::deal_round_robin(all, k, rng, fa.fold_of, next);
    }
    return fa;
}

/// Disjoint train/validation split, stratified for classification. Exactly one
/// of train_fraction / train_n applies: pass train_n <= 0 to use the fraction.
inline std::pair<Dataset, Dataset> holdout_split(const Dataset& ds, double train_fraction,
                                                 long train_n, std::uint64_t seed) {
    ds.require_encoded();
    const std::size_t n = ds.rows();
    std::size_t want;
    if (train_n > 0) {
        if (static_cast<std::size_t>(train_n) >= n)
            throw InfeasibleError("holdout_split: train_n >= row count");
        want = static_cast<std::size_t>(train_n);
    } else {
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw InfeasibleError("holdout_split: fraction must be in (0,1)");
        want = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(n)));
        if (want == 0 || want == n)
            throw InfeasibleError("holdout_split: fraction leaves one side empty");
    }
    if (want < 10) throw InfeasibleError("holdout_split: training side needs >= 10 rows");

    std::mt19937_64 rng(seed);
    std::vector<int> train_idx, val_idx;
    if (ds.task == Task::classification) {
        std::vector<int> groups[2];
        for (std::size_t i = 0; i < n; ++i)
            groups[ds.response[i] == 1.0 ? 1 : 0].push_back(static_cast<int>(i));
        // proportional allocation; the second class takes the remainder
        const double frac = static_cast<double>(want) / static_cast<double>(n);
        std::size_t taken = 0;
        for (int g = 0; g < 2; ++g) {
            auto& grp = groups[g];
            std::shuffle(grp.begin(), grp.end(), rng);
            std::size_t take = (g == 0)
                                   ? static_cast<std::size_t>(std::lround(frac * grp.size()))
                                   : want - taken;
            take = std::min(take, grp.size());
            if (g == 0) take = std::min(take, want);
            taken += take;
            train_idx.insert(train_idx.end(), grp.begin(), grp.begin() + take);
            val_idx.insert(val_idx.end(), grp.begin() + take, grp.end());
        }
        std::sort(train_idx.begin(), train_idx.end());
        std::sort(val_idx.begin(), val_idx.end());
    } else {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        std::shuffle(all.begin(), all.end(), rng);
        train_idx.assign(all.begin(), all.begin() + want);
        val_idx.assign(all.begin() + want, all.end());
        std::sort(train_idx.begin(), train_idx.end());
        std::sort(val_idx.begin(), val_idx.end());
    }

    Dataset train = ds.subset(train_idx);
    Dataset val = ds.subset(val_idx);
    if (ds.task == Task::classification) {
        const auto pos = train.n_positive();
        if (pos == 0 || pos == train.rows())
            throw InfeasibleError("holdout_split: a class is missing from the training side");
    }
    if (val.rows() == 0) throw InfeasibleError("holdout_split: empty validation side");
    return {std::move(train), std::move(val)};
}

/// Response surface of the friedman1 generator at a single feature row.
inline double friedman1_response(std::span<const double> x) {
    return 10.0 * std::sin(M_PI * x[0] * x[1]) + 20.0 * (x[2] - 0.5) * (x[2] - 0.5) +
           10.0 * x[3] + 5.0 * x[4];
}

enum class SyntheticKind { two_gaussians, friedman1 };

inline SyntheticKind parse_synthetic_kind(const std::string& s) {
    if (s == "two-gaussians") return SyntheticKind::two_gaussians;
    if (s == "friedman1") return SyntheticKind::friedman1;
    throw DataError("unknown synthetic kind: " + s);
}

/// Synthetic desk-scale datasets, already encoded (all-continuous features).
/// two-gaussians: binary, 2 features, class means (-1,-1) and (+1,+1),
/// isotropic noise. friedman1: regression, 10 uniform(0,1) features.
inline Dataset make_synthetic(SyntheticKind kind, std::size_t n, double noise,
                              std::uint64_t seed) {
    if (n < 20) throw InfeasibleError("make_synthetic: n must be >= 20");
    if (noise < 0.0) throw InfeasibleError("make_synthetic: noise must be >= 0");

    Dataset ds;
    ds.encoded = true;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    if (kind == SyntheticKind::two_gaussians) {
        ds.name = "two-gaussians";
        ds.task = Task::classification;
        ds.class_labels = {"0", "1"};
        ds.features = Matrix(n, 2);
        ds.response.resize(n);
        ds.feature_names = {"x1", "x2"};
        for (std::size_t i = 0; i < n; ++i) {
            const int label = static_cast<int>(i % 2);
            const double mu = label == 1 ? 1.0 : -1.0;
            ds.features(i, 0) = mu + noise * gauss(rng);
            ds.features(i, 1) = mu + noise * gauss(rng);
            ds.response[i] = label;
        }
    } else {
        ds.name = "friedman1";
        ds.task = Task::regression;
        ds.features = Matrix(n, 10);
        ds.response.resize(n);
        for (int j = 1; j <= 10; ++j) ds.feature_names.push_back("x" + std::to_string(j));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < 10; ++j) ds.features(i, j) = unif(rng);
            ds.response[i] = friedman1_response(ds.features.row(i)) + noise * gauss(rng);
        }
    }
    for (auto& plan_name : ds.feature_names) {
        Encoder::ColumnPlan plan;
        plan.name = plan_name;
        plan.kind = ColumnKind::continuous;
        ds.encoder.columns.push_back(std::move(plan));
    }
    return ds;
}

/// Writes an encoded dataset as a CSV consumable by load_csv. The response is
/// the last column, named "y"; classification labels are written as 0/1.
inline void write_csv(const Dataset& ds, std::ostream& out) {
    ds.require_encoded();
    for (const auto& fn : ds.feature_names) out << fn << ',';
    out << "y\n";
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        for (std::size_t c = 0; c < ds.features.cols(); ++c)
            out << detail::format_double(ds.features(r, c)) << ',';
        if (ds.task == Task::classification)
            out << static_cast<int>(ds.response[r]) << '\n';
        else
            out << detail::format_double(ds.response[r]) << '\n';
    }
}

inline void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    write_csv(ds, out);
}

}  // namespace autotune
