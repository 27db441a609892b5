#include "armamle/optimize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace armamle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
// Largest quasi-Newton predicted gain still treated as converged.
constexpr double kFlatGain = 1e-7;

bool small_change(double f_old, double f_new, double tol) {
    return std::abs(f_old - f_new) <= tol * (std::abs(f_new) + tol);
}

}  // namespace

const char* method_name(OptimizerMethod m) {
    return m == OptimizerMethod::QuasiNewton ? "quasi-newton" : "simplex";
}

void OptimizerConfig::validate() const {
    if (max_iters < 1) throw PreconditionError("max_iters must be >= 1");
    if (!(tol > 0.0)) throw PreconditionError("tol must be positive");
    if (!(grad_step > 0.0)) throw PreconditionError("grad_step must be positive");
}

std::vector<double> fd_gradient(const BatchObjective& f, std::span<const double> x, double fx,
                                double step) {
    const std::size_t k = x.size();
    std::vector<std::vector<double>> points;
    points.reserve(2 * k);
    std::vector<double> h(k);
    for (std::size_t i = 0; i < k; ++i) {
        h[i] = step * std::max(1.0, std::abs(x[i]));
        std::vector<double> plus(x.begin(), x.end());
        std::vector<double> minus(x.begin(), x.end());
        plus[i] += h[i];
        minus[i] -= h[i];
        points.push_back(std::move(plus));
        points.push_back(std::move(minus));
    }
    std::vector<double> values(points.size());
    f(points, values);

    std::vector<double> g(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const double fp = values[2 * i];
        const double fm = values[2 * i + 1];
        const bool ok_p = std::isfinite(fp);
        const bool ok_m = std::isfinite(fm);
        if (ok_p && ok_m) {
            g[i] = (fp - fm) / (2.0 * h[i]);
        } else if (ok_p) {
            g[i] = (fp - fx) / h[i];
        } else if (ok_m) {
            g[i] = (fx - fm) / h[i];
        }
    }
    return g;
}

MinimizeResult minimize_bfgs(const ScalarObjective& f, const BatchObjective& fb,
                             std::vector<double> x0, const OptimizerConfig& cfg) {
    cfg.validate();
    const auto k = static_cast<Eigen::Index>(x0.size());
    MinimizeResult res;
    res.x = std::move(x0);
    res.f = f(res.x);
    res.evaluations = 1;
    res.hessian = Eigen::MatrixXd::Identity(k, k);
    if (!std::isfinite(res.f)) return res;
    if (k == 0) {
        res.converged = true;
        return res;
    }

    auto gradient = [&](const std::vector<double>& x, double fx) {
        res.evaluations += static_cast<int>(2 * x.size());
        const auto g = fd_gradient(fb, x, fx, cfg.grad_step);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(g.data(), k));
    };

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(res.x.data(), k);
    Eigen::VectorXd g = gradient(res.x, res.f);
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(k, k);
    bool fresh = true;  // H is an unscaled identity
    bool scaled = false;
    int small_steps = 0;
    std::vector<double> trial(static_cast<std::size_t>(k));

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        res.iterations = iter;
        if (g.lpNorm<Eigen::Infinity>() == 0.0) {
            res.converged = true;
            break;
        }
        Eigen::VectorXd d = -H * g;
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            H.setIdentity();
            fresh = true;
            d = -g;
            slope = g.dot(d);
        }
        double alpha = 1.0;
        if (fresh) alpha = std::min(1.0, 0.1 / d.lpNorm<Eigen::Infinity>());
        const double alpha0 = alpha;

        bool accepted = false;
        double f_new = kInf;
        int backtracks = 0;
        for (; backtracks < kMaxBacktracks; ++backtracks) {
            for (Eigen::Index i = 0; i < k; ++i) trial[i] = x[i] + alpha * d[i];
            f_new = f(trial);
            ++res.evaluations;
            if (std::isfinite(f_new) && f_new <= res.f + kArmijo * alpha * slope) {
                accepted = true;
                break;
            }
            if (std::isfinite(f_new)) {
                // Quadratic interpolation, safeguarded to [0.1, 0.5] alpha.
                const double denom = 2.0 * (f_new - res.f - slope * alpha);
                double next = denom > 0.0 ? -slope * alpha * alpha / denom : 0.5 * alpha;
                alpha = std::clamp(next, 0.1 * alpha, 0.5 * alpha);
            } else {
                alpha *= 0.5;
            }
        }
        if (!accepted) {
            if (!fresh) {
                H.setIdentity();
                fresh = true;
                scaled = false;
                continue;
            }
            break;  // no feasible descent from here
        }

        const Eigen::VectorXd x_new = Eigen::Map<const Eigen::VectorXd>(trial.data(), k);
        const Eigen::VectorXd g_new = gradient(trial, f_new);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
            if (!scaled) {
                H = Eigen::MatrixXd::Identity(k, k) * (sy / y.squaredNorm());
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::VectorXd Hy = H * y;
            H += (rho * rho * y.dot(Hy) + rho) * s * s.transpose() -
                 rho * (Hy * s.transpose() + s * Hy.transpose());
            fresh = false;
        }

        const bool small = small_change(res.f, f_new, cfg.tol);
        small_steps = small ? small_steps + 1 : 0;
        x = x_new;
        g = g_new;
        res.f = f_new;
        res.x = trial;
        // A stalled step is not enough: the model must also predict no further gain.
        const double predicted = fresh ? 0.0 : 0.5 * g.dot(H * g);
        const bool flat = predicted <= std::min(kFlatGain, cfg.tol * (std::abs(res.f) + cfg.tol));
        if (small && flat && (backtracks == 0 || alpha == alpha0 || small_steps >= 2)) {
            res.converged = true;
            break;
        }
        if (s.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
            res.converged = true;
            break;
        }
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        res.hessian = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    } else {
        res.hessian = H.completeOrthogonalDecomposition().pseudoInverse();
    }
    return res;
}

MinimizeResult minimize_nelder_mead(const ScalarObjective& f, std::vector<double> x0,
                                    const OptimizerConfig& cfg) {
    cfg.validate();
    const std::size_t k = x0.size();
    MinimizeResult res;
    res.x = x0;
    res.f = f(x0);
    res.evaluations = 1;
    res.hessian = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k),
                                            static_cast<Eigen::Index>(k));
    if (!std::isfinite(res.f)) return res;
    if (k == 0) {
        res.converged = true;
        return res;
    }

    std::vector<std::vector<double>> simplex{x0};
    std::vector<double> fv{res.f};
    for (std::size_t i = 0; i < k; ++i) {
        double delta = 0.1 * std::max(1.0, std::abs(x0[i]));
        std::vector<double> v = x0;
        double fvv = kInf;
        for (int attempt = 0; attempt < 20 && !std::isfinite(fvv); ++attempt) {
            v = x0;
            v[i] += (attempt % 2 == 0 ? delta : -delta);
            fvv = f(v);
            ++res.evaluations;
            if (attempt % 2 == 1) delta *= 0.5;
        }
        simplex.push_back(std::move(v));
        fv.push_back(fvv);
    }

    std::vector<std::size_t> idx(k + 1);
    auto centroid_without_worst = [&]() {
        std::vector<double> c(k, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < k; ++i) c[i] += simplex[idx[j]][i];
        }
        for (double& v : c) v /= static_cast<double>(k);
        return c;
    };
    auto along = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
        std::vector<double> out(k);
        for (std::size_t i = 0; i < k; ++i) out[i] = c[i] + t * (w[i] - c[i]);
        return out;
    };

    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        res.iterations = iter;
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = idx.front();
        const std::size_t worst = idx.back();
        const std::size_t second = idx[k - 1];
        if (std::isfinite(fv[worst]) && small_change(fv[worst], fv[best], cfg.tol)) {
            res.converged = true;
            break;
        }
        const auto c = centroid_without_worst();
        const auto xr = along(c, simplex[worst], -1.0);
        const double fr = f(xr);
        ++res.evaluations;
        if (fr < fv[best]) {
            const auto xe = along(c, simplex[worst], -2.0);
            const double fe = f(xe);
            ++res.evaluations;
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        const auto xc = along(c, simplex[worst], outside ? -0.5 : 0.5);
        const double fc = f(xc);
        ++res.evaluations;
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t j = 1; j <= k; ++j) {
            const std::size_t v = idx[j];
            simplex[v] = along(simplex[best], simplex[v], 0.5);
            fv[v] = f(simplex[v]);
            ++res.evaluations;
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = simplex[best];
    res.f = fv[best];
    return res;
}

std::vector<double> loglik_gradient(const LoglikEvaluator& eval, std::span<const double> x,
                                    double step) {
    const double fx = eval(x);
    BatchObjective fb = [&](std::span<const std::vector<double>> pts, std::span<double> out) {
        eval.evaluate(pts, out);
    };
    return fd_gradient(fb, x, fx, step);
}

OptimizeOutcome maximize_loglik(const LoglikEvaluator& eval, const ArmaParams& init,
                                const OptimizerConfig& cfg, std::span<const int> fixed) {
    const ArmaOrder& order = eval.order();
    if (!validate_params(init, order).ok()) {
        throw PreconditionError("initial parameters are not causal and invertible");
    }
    const std::vector<double> full = to_vector(init, order);
    std::vector<int> free;
    for (int i = 0; i < order.free_dim(); ++i) {
        if (std::find(fixed.begin(), fixed.end(), i) == fixed.end()) free.push_back(i);
    }

    auto embed = [&](std::span<const double> xf) {
        std::vector<double> x = full;
        for (std::size_t i = 0; i < free.size(); ++i) x[free[i]] = xf[i];
        return x;
    };
    ScalarObjective f = [&](std::span<const double> xf) { return -eval(embed(xf)); };
    BatchObjective fb = [&](std::span<const std::vector<double>> pts, std::span<double> out) {
        std::vector<std::vector<double>> full_pts;
        full_pts.reserve(pts.size());
        for (const auto& p : pts) full_pts.push_back(embed(p));
        eval.evaluate(full_pts, out);
        for (double& v : out) v = -v;
    };

    std::vector<double> x0;
    for (int i : free) x0.push_back(full[i]);
    const double f0 = f(x0);
    if (!std::isfinite(f0)) {
        throw NumericalDegeneracyError("log-likelihood is not finite at the initial parameters");
    }

    MinimizeResult mr = cfg.method == OptimizerMethod::Simplex
                            ? minimize_nelder_mead(f, x0, cfg)
                            : minimize_bfgs(f, fb, x0, cfg);
    if (!(mr.f <= f0)) {  // never return worse than the start
        mr.x = x0;
        mr.f = f0;
        mr.converged = false;
    }

    OptimizeOutcome out;
    const std::vector<double> xbest = embed(mr.x);
    out.params = from_vector(xbest, order, eval.sigma2_hat(xbest));
    out.objective = -mr.f;
    out.iterations = mr.iterations;
    out.evaluations = mr.evaluations;
    out.converged = mr.converged;
    if (cfg.method == OptimizerMethod::QuasiNewton) out.approx_hessian = mr.hessian;
    return out;
}

OptimizeOutcome maximize_loglik(const TimeSeries& series, const ArmaParams& init,
                                const ArmaOrder& order, const OptimizerConfig& cfg) {
    const LoglikEvaluator eval(series, order);
    return maximize_loglik(eval, init, cfg);
}

ArmaParams zero_params(const TimeSeries& series, const ArmaOrder& order) {
    ArmaParams p;
    p.phi.assign(static_cast<std::size_t>(order.p), 0.0);
    p.theta.assign(static_cast<std::size_t>(order.q), 0.0);
    p.mean = order.include_mean ? series.mean() : 0.0;
    const double var = series.variance();
    p.sigma2 = var > 0.0 ? var : 1.0;
    return p;
}

CssResult minimize_css(const TimeSeries& series, const ArmaOrder& order,
                       const OptimizerConfig& cfg) {
    if (series.has_missing()) {
        throw UnsupportedGapError("CSS initialization requires a series without gaps");
    }
    const int n_used = static_cast<int>(series.size()) - order.p;
    const ArmaParams zero = zero_params(series, order);
    CssResult out;
    if (n_used <= 0) {
        out.params = zero;
        out.fallback = true;
        return out;
    }

    ScalarObjective f = [&](std::span<const double> x) {
        const double ss = css_objective(series, from_vector(x, order), order);
        if (!std::isfinite(ss)) return kInf;
        if (ss <= 0.0) return -kInf;
        return 0.5 * n_used * std::log(ss / n_used);
    };
    BatchObjective fb = [&](std::span<const std::vector<double>> pts, std::span<double> vals) {
        for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = f(pts[i]);
    };

    const std::vector<double> x0 = to_vector(zero, order);
    MinimizeResult mr;
    if (!std::isfinite(f(x0))) {
        mr.x = x0;  // perfectly fitting or degenerate series; keep zeros
    } else {
        mr = cfg.method == OptimizerMethod::Simplex ? minimize_nelder_mead(f, x0, cfg)
                                                    : minimize_bfgs(f, fb, x0, cfg);
    }
    ArmaParams est = from_vector(mr.x, order);
    est.sigma2 = 1.0;
    out.converged = mr.converged;
    if (!validate_params(est, order).ok()) {
        out.params = zero;
        out.fallback = true;
    } else {
        out.params = est;
    }
    out.css = css_objective(series, out.params, order);
    out.params.sigma2 = out.css / n_used;
    if (!(out.params.sigma2 > 0.0)) out.params.sigma2 = zero.sigma2;
    return out;
}

}  // namespace armamle
