#include "armamle/inference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "armamle/parallel.hpp"
#include "armamle/poly.hpp"

namespace armamle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double aic(double loglik, const ArmaOrder& order) {
    return -2.0 * loglik + 2.0 * order.aic_dim();
}

// ---------------------------------------------------------------------------

FisherResult fisher_se(const FitResult& fit, const TimeSeries& series, double rel_step) {
    const ArmaOrder& order = fit.order;
    const LoglikEvaluator eval(series, order);
    const std::vector<double> x = to_vector(fit.params, order);
    const int k = order.free_dim();

    FisherResult out;
    out.se.assign(static_cast<std::size_t>(k), std::nullopt);
    out.information = Eigen::MatrixXd::Zero(k, k);
    if (k == 0) return out;

    const double f0 = eval(x);
    if (!std::isfinite(f0)) {
        out.boundary = true;
        out.warnings.emplace_back("log-likelihood is not finite at the estimate");
        return out;
    }

    // Shrink each coordinate's step until its +/- stencil is feasible.
    std::vector<double> h(static_cast<std::size_t>(k));
    std::vector<bool> usable(static_cast<std::size_t>(k), false);
    for (int i = 0; i < k; ++i) {
        double hi = rel_step * std::max(1.0, std::abs(x[i]));
        for (int attempt = 0; attempt < 4; ++attempt, hi *= 0.1) {
            std::vector<double> plus = x, minus = x;
            plus[i] += hi;
            minus[i] -= hi;
            if (std::isfinite(eval(plus)) && std::isfinite(eval(minus))) {
                usable[i] = true;
                break;
            }
        }
        h[i] = hi;
        if (!usable[i]) {
            out.boundary = true;
            out.warnings.push_back("stencil for coordinate " + std::to_string(i) +
                                   " crosses the validity boundary");
        }
    }

    std::vector<int> idx;
    for (int i = 0; i < k; ++i) {
        if (usable[i]) idx.push_back(i);
    }
    const int m = static_cast<int>(idx.size());

    // Stencil: x +/- h_i e_i, and x +/- h_i e_i +/- h_j e_j for i < j.
    std::vector<std::vector<double>> pts;
    auto shifted = [&](int i, double si, int j, double sj) {
        std::vector<double> v = x;
        v[i] += si * h[i];
        if (j >= 0) v[j] += sj * h[j];
        return v;
    };
    for (int a = 0; a < m; ++a) {
        pts.push_back(shifted(idx[a], 1, -1, 0));
        pts.push_back(shifted(idx[a], -1, -1, 0));
    }
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            for (double si : {1.0, -1.0}) {
                for (double sj : {1.0, -1.0}) pts.push_back(shifted(idx[a], si, idx[b], sj));
            }
        }
    }
    std::vector<double> vals(pts.size());
    eval.evaluate(pts, vals);

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    bool cross_ok = true;
    for (int a = 0; a < m; ++a) {
        const double hi = h[idx[a]];
        H(a, a) = (vals[2 * a] - 2.0 * f0 + vals[2 * a + 1]) / (hi * hi);
    }
    std::size_t pos = 2 * static_cast<std::size_t>(m);
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            const double fpp = vals[pos], fpm = vals[pos + 1], fmp = vals[pos + 2], fmm = vals[pos + 3];
            pos += 4;
            if (!std::isfinite(fpp) || !std::isfinite(fpm) || !std::isfinite(fmp) || !std::isfinite(fmm)) {
                cross_ok = false;
                continue;
            }
            H(a, b) = H(b, a) = (fpp - fpm - fmp + fmm) / (4.0 * h[idx[a]] * h[idx[b]]);
        }
    }
    if (!cross_ok) {
        out.boundary = true;
        out.warnings.emplace_back("mixed-difference stencil crosses the validity boundary");
    }

    const Eigen::MatrixXd info = -H;
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) out.information(idx[a], idx[b]) = info(a, b);
    }

    Eigen::LLT<Eigen::MatrixXd> llt(info);
    Eigen::MatrixXd cov;
    if (llt.info() == Eigen::Success) {
        cov = llt.solve(Eigen::MatrixXd::Identity(m, m));
    } else {
        out.singular = true;
        out.warnings.emplace_back("information matrix is not positive definite");
        Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
        if (lu.isInvertible()) cov = lu.inverse();
    }
    if (cov.size() > 0) {
        for (int a = 0; a < m; ++a) {
            const double v = cov(a, a);
            if (v > 0.0 && std::isfinite(v)) out.se[idx[a]] = std::sqrt(v);
        }
    }

    const double ar_mod = poly::max_inv_root_modulus(fit.params.phi, poly::Kind::AR);
    const double ma_mod = poly::max_inv_root_modulus(fit.params.theta, poly::Kind::MA);
    if (std::max(ar_mod, ma_mod) >= kNearUnitRoot) {
        out.boundary = true;
        out.warnings.emplace_back("an inverted root lies near the unit circle");
    }
    return out;
}

// ---------------------------------------------------------------------------

double lr_cutoff(double level, int df) {
    boost::math::chi_squared dist(df);
    return 0.5 * boost::math::quantile(dist, level);
}

LrTest lr_test(double ll0, double ll1, int df) {
    if (df < 1) throw PreconditionError("lr_test: df must be >= 1");
    if (ll1 < ll0 - kNestingTol) {
        throw InconsistentNestingError("larger model has a lower maximized log-likelihood");
    }
    LrTest out;
    out.delta = ll1 - ll0;
    const double stat = std::max(0.0, 2.0 * out.delta);
    boost::math::chi_squared dist(df);
    out.p_value = stat == 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, stat));
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct ProfilePoint {
    bool ok = false;
    bool infeasible = false;  // no valid parameter vector found with this pin
    double loglik = kNegInf;
    ArmaParams params;
};

// Replaces coordinate `id` of params by `value`.
ArmaParams pinned(const ArmaParams& base, const ArmaOrder& order, int id, double value) {
    std::vector<double> x = to_vector(base, order);
    x[id] = value;
    return from_vector(x, order, base.sigma2);
}

ProfilePoint profile_point(const LoglikEvaluator& eval, const TimeSeries& series, int id,
                           double value, const ArmaParams* warm, std::uint64_t seed,
                           const ProfileConfig& pcfg, const MultistartConfig& base) {
    const ArmaOrder& order = eval.order();
    const int fixed[1] = {id};
    ProfilePoint out;
    double incumbent = kNegInf;
    int stale = 0;
    int starts = 0;

    auto consider = [&](const ArmaParams& init) {
        ++starts;
        try {
            const OptimizeOutcome oc = maximize_loglik(eval, init, base.optimizer, fixed);
            if (oc.objective > out.loglik) {
                out.loglik = oc.objective;
                out.params = oc.params;
                out.ok = std::isfinite(oc.objective);
            }
            if (oc.objective > incumbent + base.improvement_eps) {
                incumbent = oc.objective;
                return true;
            }
        } catch (const Error&) {
        }
        return false;
    };

    bool any_valid = false;
    if (warm) {
        const ArmaParams init = pinned(*warm, order, id, value);
        if (validate_params(init, order).ok()) {
            any_valid = true;
            consider(init);
        }
    }
    Rng rng = make_rng(seed);
    while (starts < pcfg.inner_max_starts && stale < pcfg.inner_M) {
        std::optional<ArmaParams> init;
        for (int tries = 0; tries < 50 && !init; ++tries) {
            ArmaParams cand = pinned(sample_params(order, base.sampler, rng, &series), order, id, value);
            if (validate_params(cand, order).ok()) init = std::move(cand);
        }
        if (!init) {
            ++stale;  // count the failed draw against the window
            continue;
        }
        any_valid = true;
        if (consider(*init)) {
            stale = 0;
        } else {
            ++stale;
        }
    }
    out.infeasible = !any_valid;
    return out;
}

}  // namespace

ProfileCurve profile_ci(const TimeSeries& series, const FitResult& fit, int parameter_id,
                        const ProfileConfig& pcfg, const MultistartConfig& base) {
    const ArmaOrder& order = fit.order;
    if (parameter_id < 0 || parameter_id >= order.free_dim()) {
        throw DimensionError("profile parameter index out of range");
    }
    if (!(pcfg.level > 0.0 && pcfg.level < 1.0)) throw PreconditionError("level must lie in (0,1)");

    const LoglikEvaluator eval(series, order);
    ProfileCurve curve;
    curve.parameter_id = parameter_id;
    curve.parameter_name = parameter_names(order)[parameter_id];
    curve.mle_value = to_vector(fit.params, order)[parameter_id];
    curve.mle_loglik = fit.loglik;
    curve.cutoff = lr_cutoff(pcfg.level, 1);

    double half = pcfg.fallback_half_width;
    std::optional<double> se;
    if (fit.se && (*fit.se)[parameter_id]) {
        se = *(*fit.se)[parameter_id];
    } else {
        se = fisher_se(fit, series).se[parameter_id];
    }
    if (se && *se > 0.0 && std::isfinite(*se)) half = pcfg.span_se * *se;
    const int per_side = std::max(1, (pcfg.min_points - 1) / 2);
    const double step = half / per_side;

    struct Node {
        double value;
        ProfilePoint point;
    };
    // Centre, then each side walking outward with warm starts.
    const ProfilePoint centre =
        profile_point(eval, series, parameter_id, curve.mle_value, &fit.params,
                      base.sampler.seed, pcfg, base);
    std::vector<Node> left, right;
    bool left_open = false, right_open = false;

    auto walk = [&](int direction, std::vector<Node>& side, bool& open) {
        const ArmaParams* warm = centre.ok ? &centre.params : &fit.params;
        double peak = centre.ok ? centre.loglik : fit.loglik;
        int k = 0;
        for (int widen = 0; widen <= pcfg.max_widenings; ++widen) {
            for (int s = 0; s < per_side; ++s) {
                ++k;
                const double value = curve.mle_value + direction * k * step;
                const std::uint64_t seed =
                    base.sampler.seed + 7919u * static_cast<std::uint64_t>(k) + (direction > 0 ? 1u : 0u);
                ProfilePoint pt = profile_point(eval, series, parameter_id, value, warm, seed, pcfg, base);
                if (pt.infeasible) {
                    // Fill the rest of this side by bisecting toward the boundary.
                    open = true;
                    double inside = side.empty() ? curve.mle_value : side.back().value;
                    double outside = value;
                    int attempt = 0;
                    while (static_cast<int>(side.size()) < per_side && std::abs(outside - inside) > 1e-9) {
                        const double mid = 0.5 * (inside + outside);
                        ProfilePoint mp = profile_point(eval, series, parameter_id, mid, warm,
                                                        seed + 104729u * static_cast<std::uint64_t>(++attempt),
                                                        pcfg, base);
                        if (mp.infeasible) {
                            outside = mid;
                            continue;
                        }
                        inside = mid;
                        if (mp.ok) {
                            warm = &(side.emplace_back(Node{mid, std::move(mp)}).point.params);
                        } else {
                            side.push_back(Node{mid, std::move(mp)});
                        }
                    }
                    return;
                }
                if (pt.ok) {
                    warm = &(side.emplace_back(Node{value, std::move(pt)}).point.params);
                    peak = std::max(peak, side.back().point.loglik);
                } else {
                    side.push_back(Node{value, std::move(pt)});
                }
            }
            // Stop widening once the outermost feasible point is below the cutoff.
            bool crossed = false;
            for (auto it = side.rbegin(); it != side.rend(); ++it) {
                if (it->point.ok) {
                    crossed = it->point.loglik < peak - curve.cutoff;
                    break;
                }
            }
            if (crossed) return;
        }
        open = true;
    };
    // Warm pointers into `side` must stay valid while it grows.
    left.reserve(static_cast<std::size_t>(per_side * (pcfg.max_widenings + 1)));
    right.reserve(static_cast<std::size_t>(per_side * (pcfg.max_widenings + 1)));
    walk(-1, left, left_open);
    walk(+1, right, right_open);

    std::vector<Node> nodes;
    for (auto it = left.rbegin(); it != left.rend(); ++it) nodes.push_back(*it);
    nodes.push_back(Node{curve.mle_value, centre});
    for (const auto& n : right) nodes.push_back(n);

    for (const auto& n : nodes) {
        if (!n.point.ok) {
            ++curve.dropped_points;
            continue;
        }
        curve.grid.push_back(n.value);
        curve.profile_loglik.push_back(n.point.loglik);
    }
    if (curve.grid.empty()) {
        throw NumericalDegeneracyError("profile likelihood could not be evaluated at any grid point");
    }

    const auto& g = curve.grid;
    const auto& ll = curve.profile_loglik;
    const double peak = *std::max_element(ll.begin(), ll.end());
    const double thr = peak - curve.cutoff;
    std::size_t lo = g.size(), hi = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (ll[i] >= thr) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }
    auto crossing = [&](std::size_t inside, std::size_t outside) {
        const double t = (ll[inside] - thr) / (ll[inside] - ll[outside]);
        return g[inside] + t * (g[outside] - g[inside]);
    };
    if (lo == 0) {
        curve.ci_low = g.front();
        curve.lower_open = true;
    } else {
        curve.ci_low = crossing(lo, lo - 1);
    }
    if (hi + 1 == g.size()) {
        curve.ci_high = g.back();
        curve.upper_open = true;
    } else {
        curve.ci_high = crossing(hi, hi + 1);
    }
    curve.lower_open = curve.lower_open || (left_open && lo == 0);
    curve.upper_open = curve.upper_open || (right_open && hi + 1 == g.size());
    return curve;
}

// ---------------------------------------------------------------------------

bool AicTable::implicated(int p, int q) const {
    for (const auto& v : inconsistencies) {
        if ((v.smaller.first == p && v.smaller.second == q) ||
            (v.larger.first == p && v.larger.second == q)) {
            return true;
        }
    }
    return false;
}

std::optional<std::pair<int, int>> AicTable::best() const {
    std::optional<std::pair<int, int>> out;
    double best_aic = std::numeric_limits<double>::infinity();
    for (const auto& c : cells) {
        if (c.fit && c.fit->aic < best_aic) {
            best_aic = c.fit->aic;
            out = std::make_pair(c.p, c.q);
        }
    }
    return out;
}

std::vector<NestedViolation> find_inconsistencies(const std::vector<double>& loglik, int max_p,
                                                  int max_q, double tol) {
    std::vector<NestedViolation> out;
    const int cols = max_q + 1;
    for (int p1 = 0; p1 <= max_p; ++p1) {
        for (int q1 = 0; q1 <= max_q; ++q1) {
            const double small = loglik[p1 * cols + q1];
            if (std::isnan(small)) continue;
            for (int p2 = p1; p2 <= max_p; ++p2) {
                for (int q2 = q1; q2 <= max_q; ++q2) {
                    if (p1 == p2 && q1 == q2) continue;
                    const double large = loglik[p2 * cols + q2];
                    if (std::isnan(large)) continue;
                    if (small > large + tol) {
                        out.push_back({{p1, q1}, {p2, q2}, small - large});
                    }
                }
            }
        }
    }
    return out;
}

namespace {

std::vector<double> table_logliks(const AicTable& t) {
    std::vector<double> ll;
    ll.reserve(t.cells.size());
    for (const auto& c : t.cells) ll.push_back(c.fit ? c.fit->loglik : kNaN);
    return ll;
}

}  // namespace

AicTable build_aic_table(const TimeSeries& series, int max_p, int max_q, bool include_mean,
                         const MultistartConfig& cfg, FitArm arm) {
    if (max_p < 0 || max_q < 0 || max_p > kMaxTableOrder || max_q > kMaxTableOrder) {
        throw PreconditionError("AIC table orders must lie in [0, 6]");
    }
    AicTable table;
    table.max_p = max_p;
    table.max_q = max_q;
    table.include_mean = include_mean;
    for (int p = 0; p <= max_p; ++p) {
        for (int q = 0; q <= max_q; ++q) table.cells.push_back(AicCell{p, q, std::nullopt, {}});
    }
    MultistartConfig cell_cfg = cfg;
    cell_cfg.threads = 1;
    parallel_for(table.cells.size(), cfg.threads, [&](std::size_t i) {
        AicCell& cell = table.cells[i];
        const ArmaOrder order(cell.p, cell.q, include_mean);
        try {
            cell.fit = arm == FitArm::Single ? fit_single(series, order, cell_cfg)
                                             : fit_multistart(series, order, cell_cfg);
        } catch (const Error& e) {
            cell.error = e.what();
        }
    });
    table.inconsistencies = find_inconsistencies(table_logliks(table), max_p, max_q);
    return table;
}

std::vector<double> replay_table_logliks(const AicTable& table, int M, int max_starts,
                                         double improvement_eps) {
    std::vector<double> out;
    out.reserve(table.cells.size());
    for (const auto& c : table.cells) {
        if (!c.fit) {
            out.push_back(kNaN);
        } else if (M <= 0) {
            out.push_back(c.fit->per_start_logliks.front());
        } else {
            out.push_back(replay_stopping(c.fit->per_start_logliks, M, max_starts, improvement_eps).loglik);
        }
    }
    return out;
}

std::string render_aic_table(const AicTable& table, int decimals) {
    std::ostringstream out;
    constexpr int width = 12;
    out << std::setw(5) << "";
    for (int q = 0; q <= table.max_q; ++q) out << std::setw(width) << ("MA" + std::to_string(q));
    out << '\n';
    out << std::fixed << std::setprecision(decimals);
    for (int p = 0; p <= table.max_p; ++p) {
        out << std::setw(5) << std::left << ("AR" + std::to_string(p)) << std::right;
        for (int q = 0; q <= table.max_q; ++q) {
            const AicCell& c = table.at(p, q);
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(decimals);
            if (c.fit) {
                cell << c.fit->aic << (table.implicated(p, q) ? "*" : " ");
            } else {
                cell << "NA ";
            }
            out << std::setw(width) << cell.str();
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace armamle
