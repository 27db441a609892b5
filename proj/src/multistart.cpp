#include "armamle/multistart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "armamle/inference.hpp"
#include "armamle/parallel.hpp"

namespace armamle {

namespace {

struct StartResult {
    OptimizeOutcome outcome;
    bool ok = false;
};

StartResult run_start(const LoglikEvaluator& eval, const ArmaParams& init,
                      const OptimizerConfig& cfg) {
    StartResult r;
    try {
        r.outcome = maximize_loglik(eval, init, cfg);
        r.ok = std::isfinite(r.outcome.objective);
    } catch (const NumericalDegeneracyError&) {
        r.ok = false;
    }
    return r;
}

ArmaParams initial_params(const TimeSeries& series, const ArmaOrder& order,
                          const OptimizerConfig& cfg, bool& fallback) {
    fallback = false;
    if (series.has_missing()) {
        fallback = true;
        return zero_params(series, order);
    }
    const CssResult css = minimize_css(series, order, cfg);
    fallback = css.fallback;
    return css.params;
}

}  // namespace

void MultistartConfig::validate() const {
    if (M < 1) throw PreconditionError("M must be >= 1");
    if (max_starts < 1) throw PreconditionError("max_starts must be >= 1");
    if (!(improvement_eps > 0.0)) throw PreconditionError("improvement_eps must be positive");
    sampler.validate();
    optimizer.validate();
}

StopReplay replay_stopping(std::span<const double> lls, int M, int max_starts,
                           double improvement_eps) {
    StopReplay out;
    if (lls.empty()) return out;
    double incumbent = lls[0];
    int stale = 0;
    std::size_t used = 1;
    while (used < lls.size() && static_cast<int>(used) < max_starts && stale < M) {
        const double ll = lls[used];
        if (ll > incumbent + improvement_eps) {
            incumbent = ll;
            stale = 0;
        } else {
            ++stale;
        }
        ++used;
    }
    out.n_starts = static_cast<int>(used);
    out.best_start = 0;
    for (std::size_t k = 1; k < used; ++k) {
        if (lls[k] > lls[out.best_start]) out.best_start = static_cast<int>(k);
    }
    out.loglik = lls[out.best_start];
    return out;
}

FitResult fit_multistart(const TimeSeries& series, const ArmaOrder& order,
                         const MultistartConfig& cfg) {
    cfg.validate();
    const LoglikEvaluator eval(series, order);

    FitResult fit;
    fit.order = order;
    const ArmaParams init0 = initial_params(series, order, cfg.optimizer, fit.css_fallback);
    std::vector<StartResult> starts;
    starts.push_back(run_start(eval, init0, cfg.optimizer));
    if (!starts[0].ok) {
        throw NumericalDegeneracyError("log-likelihood could not be evaluated at the first start");
    }

    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<double> lls{starts[0].outcome.objective};
    double incumbent = lls[0];
    int stale = 0;
    const int batch = cfg.threads > 1 ? cfg.M : 1;

    while (static_cast<int>(starts.size()) < cfg.max_starts && stale < cfg.M) {
        const int first = static_cast<int>(starts.size());
        const int count = std::min(batch, cfg.max_starts - first);
        std::vector<StartResult> results(static_cast<std::size_t>(count));
        parallel_for(results.size(), cfg.threads, [&](std::size_t i) {
            const auto k = static_cast<std::uint64_t>(first) + i;
            Rng rng = make_rng(cfg.sampler.seed, k);
            const ArmaParams init = sample_params(order, cfg.sampler, rng, &series);
            results[i] = run_start(eval, init, cfg.optimizer);
        });
        // Reduce in start order; starts past the stopping point are discarded.
        for (auto& r : results) {
            if (stale >= cfg.M) break;
            const double ll = r.ok ? r.outcome.objective : kNegInf;
            if (ll > incumbent + cfg.improvement_eps) {
                incumbent = ll;
                stale = 0;
            } else {
                ++stale;
            }
            lls.push_back(ll);
            starts.push_back(std::move(r));
        }
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k < lls.size(); ++k) {
        if (lls[k] > lls[best]) best = k;
    }
    const OptimizeOutcome& win = starts[best].outcome;
    fit.params = win.params;
    fit.loglik = win.objective;
    fit.aic = aic(fit.loglik, order);
    fit.converged = win.converged;
    fit.best_start = static_cast<int>(best);
    fit.n_starts_used = static_cast<int>(lls.size());
    fit.per_start_logliks = std::move(lls);
    return fit;
}

FitResult fit_single(const TimeSeries& series, const ArmaOrder& order,
                     const MultistartConfig& cfg) {
    MultistartConfig single = cfg;
    single.max_starts = 1;
    return fit_multistart(series, order, single);
}

}  // namespace armamle
