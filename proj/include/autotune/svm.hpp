#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "autotune/dataset.hpp"
#include "autotune/errors.hpp"
#include "autotune/matrix.hpp"

namespace autotune {

/// RBF-kernel support vector machine (classification or epsilon regression).
/// Support vectors are stored in the standardized feature space together with
/// the scaling that produced it, so prediction accepts raw encoded rows.
struct SvmModel {
    Matrix support_vectors;
    std::vector<double> dual_coefs;  // alpha_i * y_i (classification) or beta_i (regression)
    double bias = 0.0;
    double gamma = 1.0;
    double cost = 1.0;
    double epsilon = 0.0;  // regression tube half-width; unused for classification
    ScalingParams scaling;
    Task task = Task::classification;

    double decision_row(std::span<const double> raw) const {
        double f = bias;
        std::vector<double> x(raw.begin(), raw.end());
        for (std::size_t c = 0; c < x.size(); ++c)
            x[c] = (x[c] - scaling.mean[c]) / scaling.sd[c];
        for (std::size_t s = 0; s < support_vectors.rows(); ++s)
            f += dual_coefs[s] * std::exp(-gamma * squared_distance(support_vectors.row(s), x));
        return f;
    }

    std::vector<double> decision_function(const Matrix& rows) const {
        if (rows.cols() != scaling.mean.size())
            throw DataError("svm: row width differs from training width");
        std::vector<double> out(rows.rows());
        for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = decision_row(rows.row(r));
        return out;
    }

    std::vector<double> predict(const Matrix& rows) const {
        std::vector<double> f = decision_function(rows);
        if (task == Task::classification)
            for (double& v : f) v = v > 0.0 ? 1.0 : 0.0;
        return f;
    }
};

namespace detail {

/// Lazily filled kernel row cache with a bounded footprint (~64 MB).
class KernelCache {
public:
    KernelCache(const Matrix& x, double gamma) : x_(&x), gamma_(gamma) {
        const std::size_t n = x.rows();
        rows_.resize(n);
        cached_.reserve(n);
        max_rows_ = std::max<std::size_t>(64, (64u << 20) / (sizeof(double) * std::max<std::size_t>(n, 1)));
    }

    const std::vector<double>& row(std::size_t i) {
        auto& r = rows_[i];
        if (!r.empty()) return r;
        if (cached_.size() >= max_rows_) {
            const std::size_t victim = cached_[evict_++ % cached_.size()];
            if (victim != i) {
                rows_[victim].clear();
                rows_[victim].shrink_to_fit();
            }
        }
        const std::size_t n = x_->rows();
        r.resize(n);
        const auto xi = x_->row(i);
        for (std::size_t j = 0; j < n; ++j)
            r[j] = std::exp(-gamma_ * squared_distance(xi, x_->row(j)));
        cached_.push_back(i);
        return r;
    }

private:
    const Matrix* x_;
    double gamma_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::size_t> cached_;
    std::size_t max_rows_ = 0;
    std::size_t evict_ = 0;
};

constexpr double kSmoTolerance = 1e-3;
constexpr double kSmoStepEps = 1e-8;
constexpr int kSmoNoProgressPasses = 5;

inline std::size_t smo_step_cap(std::size_t n) { return std::max<std::size_t>(20000, 200 * n); }

/// Soft-margin SVC dual solver (Platt-style sequential minimal optimization).
class SvcSolver {
public:
    SvcSolver(const Matrix& x, std::span<const double> y01, double cost, double gamma)
        : x_(x), cache_(x, gamma), c_(cost) {
        n_ = x.rows();
        y_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) y_[i] = y01[i] == 1.0 ? 1.0 : -1.0;
        alpha_.assign(n_, 0.0);
        // f(x) = sum alpha_i y_i K(x_i, x) + b starts at 0, so E_i = -y_i
        err_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) err_[i] = -y_[i];
    }

    void solve() {
        bool examine_all = true;
        int no_progress = 0;
        const std::size_t cap = smo_step_cap(n_);
        while (steps_ < cap) {
            std::size_t changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (!examine_all && (alpha_[i] <= 0.0 || alpha_[i] >= c_)) continue;
                changed += examine(i);
                if (steps_ >= cap) break;
            }
            if (changed == 0) {
                if (examine_all) break;  // full sweep with no violators: converged
                if (++no_progress >= kSmoNoProgressPasses) break;
                examine_all = true;
            } else {
                no_progress = 0;
                examine_all = false;
            }
        }
    }

    const std::vector<double>& alphas() const { return alpha_; }
    double bias() const { return b_; }
    const std::vector<double>& labels() const { return y_; }
    std::vector<double> decisions() const {
        std::vector<double> f(n_);
        for (std::size_t i = 0; i < n_; ++i) f[i] = err_[i] + y_[i];
        return f;
    }

private:
    bool violates(std::size_t i) const {
        const double r = err_[i] * y_[i];  // = y_i f(x_i) - 1
        return (r < -kSmoTolerance && alpha_[i] < c_) || (r > kSmoTolerance && alpha_[i] > 0.0);
    }

    std::size_t examine(std::size_t i2) {
        if (!violates(i2)) return 0;
        // second choice: largest |E1 - E2| over interior points
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alpha_[i] <= 0.0 || alpha_[i] >= c_) continue;
            const double gap = std::fabs(err_[i] - err_[i2]);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2)) return 1;
        const std::size_t offset = rotate_++ % n_;
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (k + offset) % n_;
            if (alpha_[i1] <= 0.0 || alpha_[i1] >= c_) continue;
            if (take_step(i1, i2)) return 1;
        }
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (k + offset) % n_;
            if (take_step(i1, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1], a2 = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = err_[i1], e2 = err_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c_, c_ + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - c_);
            hi = std::min(c_, a1 + a2);
        }
        if (lo >= hi) return false;

        const auto& krow1 = cache_.row(i1);
        const double k11 = krow1[i1], k12 = krow1[i2];
        const double k22 = cache_.row(i2)[i2];
        const double eta = k11 + k22 - 2.0 * k12;
        if (eta <= 1e-12) return false;  // coincident points in feature space

        double a2new = a2 + y2 * (e1 - e2) / eta;
        a2new = std::clamp(a2new, lo, hi);
        if (std::fabs(a2new - a2) < kSmoStepEps * (a2new + a2 + kSmoStepEps)) return false;

        double a1new = a1 + s * (a2 - a2new);
        if (a1new < 0.0) {
            a2new += s * a1new;
            a1new = 0.0;
        } else if (a1new > c_) {
            a2new += s * (a1new - c_);
            a1new = c_;
        }

        const double d1 = y1 * (a1new - a1), d2 = y2 * (a2new - a2);
        const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
        double bnew;
        if (a1new > 0.0 && a1new < c_)
            bnew = b1;
        else if (a2new > 0.0 && a2new < c_)
            bnew = b2;
        else
            bnew = 0.5 * (b1 + b2);

        const auto& row1 = cache_.row(i1);
        const auto& row2 = cache_.row(i2);
        const double db = bnew - b_;
        for (std::size_t j = 0; j < n_; ++j) err_[j] += d1 * row1[j] + d2 * row2[j] + db;

        alpha_[i1] = a1new;
        alpha_[i2] = a2new;
        b_ = bnew;
        ++steps_;
        return true;
    }

    const Matrix& x_;
    KernelCache cache_;
    double c_;
    std::size_t n_ = 0;
    std::vector<double> y_, alpha_, err_;
    double b_ = 0.0;
    std::size_t steps_ = 0;
    std::size_t rotate_ = 0;
};

/// Epsilon-insensitive SVR dual solver. Works on the net coefficients
/// beta_i = alpha_i - alpha*_i in [-C, C] with sum(beta) = 0; each pairwise
/// subproblem is a convex piecewise quadratic minimized over its breakpoints
/// and segment optima.
class SvrSolver {
public:
    SvrSolver(const Matrix& x, std::span<const double> y, double cost, double gamma,
              double epsilon)
        : x_(x), cache_(x, gamma), c_(cost), eps_(epsilon) {
        n_ = x.rows();
        y_.assign(y.begin(), y.end());
        beta_.assign(n_, 0.0);
        double m = 0.0;
        for (double v : y_) m += v;
        b_ = n_ ? m / static_cast<double>(n_) : 0.0;
        err_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) err_[i] = b_ - y_[i];  // f - y with f = b
    }

    void solve() {
        bool examine_all = true;
        int no_progress = 0;
        const std::size_t cap = smo_step_cap(n_);
        while (steps_ < cap) {
            std::size_t changed = 0;
            for (std::size_t i = 0; i < n_; ++i) {
                if (!examine_all && (beta_[i] == 0.0 || std::fabs(beta_[i]) >= c_)) continue;
                changed += examine(i);
                if (steps_ >= cap) break;
            }
            if (changed == 0) {
                if (examine_all) break;
                if (++no_progress >= kSmoNoProgressPasses) break;
                examine_all = true;
            } else {
                no_progress = 0;
                examine_all = false;
            }
        }
        finalize_bias();
    }

    const std::vector<double>& betas() const { return beta_; }
    double bias() const { return b_; }
    std::vector<double> decisions() const {
        std::vector<double> f(n_);
        for (std::size_t i = 0; i < n_; ++i) f[i] = err_[i] + y_[i];
        return f;
    }

private:
    bool violates(std::size_t i) const {
        const double r = -err_[i];  // y - f
        const double t = kSmoTolerance;
        if (r > eps_ + t && beta_[i] < c_) return true;
        if (r < -eps_ - t && beta_[i] > -c_) return true;
        if (beta_[i] > 0.0 && r < eps_ - t) return true;
        if (beta_[i] < 0.0 && r > -eps_ + t) return true;
        return false;
    }

    std::size_t examine(std::size_t i2) {
        if (!violates(i2)) return 0;
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (beta_[i] == 0.0 || std::fabs(beta_[i]) >= c_) continue;
            const double gap = std::fabs(err_[i] - err_[i2]);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2)) return 1;
        const std::size_t offset = rotate_++ % n_;
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (k + offset) % n_;
            if (take_step(i1, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i, std::size_t j) {
        if (i == j) return false;
        const double bi = beta_[i], bj = beta_[j];
        const double zeta = bi + bj;
        const double lo = std::max(-c_, zeta - c_);
        const double hi = std::min(c_, zeta + c_);
        if (hi - lo < 1e-15) return false;

        const auto& rowi = cache_.row(i);
        const double kii = rowi[i], kij = rowi[j];
        const double kjj = cache_.row(j)[j];
        const double eta = kii + kjj - 2.0 * kij;
        const double g = err_[j] - err_[i];  // d(smooth)/dt at t = bj

        // objective change relative to t0 = bj:
        // delta(t) = 0.5*eta*(t-t0)^2 + g*(t-t0) + eps*(|t|-|t0|) + eps*(|zeta-t|-|zeta-t0|)
        auto delta = [&](double t) {
            const double dt = t - bj;
            return 0.5 * eta * dt * dt + g * dt + eps_ * (std::fabs(t) - std::fabs(bj)) +
                   eps_ * (std::fabs(zeta - t) - std::fabs(zeta - bj));
        };

        std::vector<double> cand = {lo, hi};
        if (0.0 > lo && 0.0 < hi) cand.push_back(0.0);
        if (zeta > lo && zeta < hi) cand.push_back(zeta);
        if (eta > 1e-12) {
            // segment stationary points for each sign pattern of (t, zeta - t)
            for (const double s1 : {-1.0, 1.0})
                for (const double s2 : {-1.0, 1.0}) {
                    const double t = bj - (g + eps_ * s1 - eps_ * s2) / eta;
                    if (t > lo && t < hi) cand.push_back(t);
                }
        }
        double best_t = bj, best_delta = 0.0;
        for (double t : cand) {
            const double d = delta(t);
            if (d < best_delta - 1e-14) {
                best_delta = d;
                best_t = t;
            }
        }
        const double bjnew = best_t;
        if (std::fabs(bjnew - bj) < kSmoStepEps * (std::fabs(bjnew) + std::fabs(bj) + kSmoStepEps))
            return false;
        const double binew = zeta - bjnew;

        const double di = binew - bi, dj = bjnew - bj;
        const auto& rowj = cache_.row(j);
        for (std::size_t a = 0; a < n_; ++a) err_[a] += di * rowi[a] + dj * rowj[a];
        beta_[i] = binew;
        beta_[j] = bjnew;

        // re-center the bias on whichever of the two points is now interior
        double shift = 0.0;
        int votes = 0;
        for (std::size_t p : {i, j}) {
            const double bp = beta_[p];
            if (bp != 0.0 && std::fabs(bp) < c_) {
                const double target = bp > 0.0 ? eps_ : -eps_;  // y - f at optimum
                shift += -err_[p] - target;
                ++votes;
            }
        }
        if (votes > 0) {
            shift /= votes;
            b_ += shift;
            for (std::size_t a = 0; a < n_; ++a) err_[a] += shift;
        }
        ++steps_;
        return true;
    }

    /// With no interior support vector the running bias is unconstrained by
    /// any equality; center it inside the feasibility band implied by the
    /// bound/zero points (covers the all-inside-tube case exactly).
    void finalize_bias() {
        bool has_interior = false;
        for (double bp : beta_)
            if (bp != 0.0 && std::fabs(bp) < c_) has_interior = true;
        if (has_interior) return;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n_; ++i) {
            const double g = err_[i] + y_[i] - b_;  // f without bias
            if (beta_[i] == 0.0) {
                lo = std::max(lo, y_[i] - g - eps_);
                hi = std::min(hi, y_[i] - g + eps_);
            } else if (beta_[i] >= c_) {
                hi = std::min(hi, y_[i] - g - eps_);  // needs y - f >= eps
            } else {
                lo = std::max(lo, y_[i] - g + eps_);  // needs y - f <= -eps
            }
        }
        if (lo <= hi && std::isfinite(lo) && std::isfinite(hi)) {
            const double bnew = 0.5 * (lo + hi);
            const double shift = bnew - b_;
            b_ = bnew;
            for (std::size_t i = 0; i < n_; ++i) err_[i] += shift;
        }
    }

    const Matrix& x_;
    KernelCache cache_;
    double c_, eps_;
    std::size_t n_ = 0;
    std::vector<double> y_, beta_, err_;
    double b_ = 0.0;
    std::size_t steps_ = 0;
    std::size_t rotate_ = 0;
};

}  // namespace detail

/// Terminal solver state over the training rows, for invariant checks.
struct SvmFitInfo {
    std::vector<double> alpha;     // alpha_i (classification) or beta_i (regression)
    std::vector<double> decision;  // f(x_i) at termination
};

/// Fits a soft-margin RBF classifier by sequential minimal optimization.
inline SvmModel fit_svc(const Dataset& ds, double cost, double gamma,
                        SvmFitInfo* info = nullptr) {
    ds.require_encoded();
    if (ds.task != Task::classification)
        throw InfeasibleError("fit_svc requires a classification dataset");
    if (!(cost > 0.0) || !(gamma > 0.0))
        throw InfeasibleError("fit_svc: cost and gamma must be positive");
    const std::size_t n = ds.rows();
    const std::size_t pos = ds.n_positive();
    if (pos == 0 || pos == n) throw DataError("fit_svc: single-class dataset");

    auto [scaled, scaling] = standardize(ds);
    detail::SvcSolver solver(scaled.features, scaled.response, cost, gamma);
    solver.solve();
    if (info) {
        info->alpha = solver.alphas();
        info->decision = solver.decisions();
    }

    SvmModel model;
    model.task = Task::classification;
    model.gamma = gamma;
    model.cost = cost;
    model.epsilon = 0.0;
    model.scaling = std::move(scaling);
    model.bias = solver.bias();

    std::vector<int> sv;
    for (std::size_t i = 0; i < n; ++i)
        if (solver.alphas()[i] > 1e-8) sv.push_back(static_cast<int>(i));
    model.support_vectors = scaled.features.take_rows(sv);
    model.dual_coefs.reserve(sv.size());
    for (int i : sv)
        model.dual_coefs.push_back(solver.alphas()[static_cast<std::size_t>(i)] *
                                   solver.labels()[static_cast<std::size_t>(i)]);
    return model;
}

/// Fits epsilon-insensitive RBF support vector regression.
inline SvmModel fit_svr(const Dataset& ds, double cost, double gamma, double epsilon,
                        SvmFitInfo* info = nullptr) {
    ds.require_encoded();
    if (ds.task != Task::regression)
        throw InfeasibleError("fit_svr requires a regression dataset");
    if (!(cost > 0.0) || !(gamma > 0.0))
        throw InfeasibleError("fit_svr: cost and gamma must be positive");
    if (epsilon < 0.0) throw InfeasibleError("fit_svr: epsilon must be >= 0");

    auto [scaled, scaling] = standardize(ds);
    detail::SvrSolver solver(scaled.features, scaled.response, cost, gamma, epsilon);
    solver.solve();
    if (info) {
        info->alpha = solver.betas();
        info->decision = solver.decisions();
    }

    SvmModel model;
    model.task = Task::regression;
    model.gamma = gamma;
    model.cost = cost;
    model.epsilon = epsilon;
    model.scaling = std::move(scaling);
    model.bias = solver.bias();

    std::vector<int> sv;
    for (std::size_t i = 0; i < ds.rows(); ++i)
        if (std::fabs(solver.betas()[i]) > 1e-8) sv.push_back(static_cast<int>(i));
    model.support_vectors = scaled.features.take_rows(sv);
    for (int i : sv) model.dual_coefs.push_back(solver.betas()[static_cast<std::size_t>(i)]);
    return model;
}

}  // namespace autotune
