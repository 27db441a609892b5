#include "armamle/sim.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "armamle/parallel.hpp"

namespace armamle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Separate stream families for data and for the optimizer's sampler.
constexpr std::uint64_t kDataStream = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kSamplerStride = 1000003ull;

double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

MultistartConfig replicate_fit_config(const StudyConfig& cfg, std::uint64_t index) {
    MultistartConfig fit = cfg.fit;
    fit.sampler.seed = replicate_sampler_seed(cfg.seed, index);
    fit.threads = 1;
    return fit;
}

Rng data_rng(const StudyConfig& cfg, std::uint64_t index) {
    return make_rng(cfg.seed ^ kDataStream, index);
}

}  // namespace

void GeneratorSpec::validate() const {
    if (n < 1) throw PreconditionError("simulation length must be >= 1");
    if (burn_in < 0) throw PreconditionError("burn-in must be >= 0");
    if (!validate_params(params, order).ok()) {
        throw PreconditionError("generator parameters are not causal, invertible and positive-variance");
    }
}

TimeSeries simulate(const GeneratorSpec& spec) {
    spec.validate();
    const auto& phi = spec.params.phi;
    const auto& theta = spec.params.theta;
    const int p = spec.order.p, q = spec.order.q;
    const std::size_t total = static_cast<std::size_t>(spec.burn_in) + static_cast<std::size_t>(spec.n);

    Rng rng = make_rng(spec.seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(spec.params.sigma2));
    std::vector<double> x(total, 0.0), w(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        w[t] = noise(rng);
        double v = w[t];
        for (int i = 1; i <= p && static_cast<std::size_t>(i) <= t; ++i) v += phi[i - 1] * x[t - i];
        for (int j = 1; j <= q && static_cast<std::size_t>(j) <= t; ++j) v += theta[j - 1] * w[t - j];
        x[t] = v;
    }
    std::vector<double> out(x.begin() + spec.burn_in, x.end());
    for (double& v : out) v += spec.params.mean;
    return TimeSeries(std::move(out));
}

GeneratorSpec random_generator(const ArmaOrder& order, Rng& rng, int n) {
    SamplerConfig sc;
    sc.alpha = kGeneratorMinDistance;
    sc.gamma = 0.05;
    GeneratorSpec spec;
    spec.order = order;
    spec.params = sample_params(order, sc, rng);
    spec.params.sigma2 = 1.0;
    spec.params.mean = 0.0;
    spec.n = n;
    spec.seed = rng();
    return spec;
}

std::uint64_t replicate_sampler_seed(std::uint64_t study_seed, std::uint64_t index) {
    return study_seed + kSamplerStride * (index + 1);
}

double quantile(std::vector<double> values, double prob) {
    if (values.empty()) return kNaN;
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

// ---------------------------------------------------------------------------

ImprovementReport run_improvement_study(const std::vector<ImprovementCellSpec>& cells,
                                        const StudyConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.fit.validate();
    ImprovementReport rep;
    rep.config = cfg;
    rep.cells = cells;
    const std::size_t reps = static_cast<std::size_t>(std::max(0, cfg.replicates));
    rep.records.resize(cells.size() * reps);

    parallel_for(rep.records.size(), cfg.threads, [&](std::size_t idx) {
        ImprovementRecord& r = rep.records[idx];
        r.cell = static_cast<int>(idx / reps);
        r.replicate = static_cast<int>(idx % reps);
        const ImprovementCellSpec& cell = cells[r.cell];
        const ArmaOrder order(cell.p, cell.q, false);
        try {
            Rng rng = data_rng(cfg, idx);
            const GeneratorSpec gen = random_generator(order, rng, cell.n);
            r.truth = gen.params;
            const TimeSeries series = simulate(gen);
            const MultistartConfig fit = replicate_fit_config(cfg, idx);
            const FitResult single = fit_single(series, order, fit);
            const FitResult multi = fit_multistart(series, order, fit);
            r.loglik_single = single.loglik;
            r.loglik_multi = multi.loglik;
            r.delta = multi.loglik - single.loglik;
            r.improved = r.delta > cfg.fit.improvement_eps;
            r.n_starts = multi.n_starts_used;
            r.ok = true;
        } catch (const Error& e) {
            r.error = e.what();
        }
    });

    for (std::size_t c = 0; c < cells.size(); ++c) {
        ImprovementCellSummary s;
        s.spec = cells[c];
        std::vector<double> deltas;
        for (std::size_t i = 0; i < reps; ++i) {
            const ImprovementRecord& r = rep.records[c * reps + i];
            if (!r.ok) {
                ++s.excluded;
                continue;
            }
            ++s.replicates;
            if (r.improved) {
                ++s.improved;
                deltas.push_back(r.delta);
            }
        }
        s.proportion = s.replicates ? static_cast<double>(s.improved) / s.replicates : kNaN;
        s.delta_q25 = quantile(deltas, 0.25);
        s.delta_median = quantile(deltas, 0.5);
        s.delta_q75 = quantile(deltas, 0.75);
        rep.summary.push_back(s);
    }
    rep.seconds = elapsed(t0);
    return rep;
}

// ---------------------------------------------------------------------------

CoverageReport run_coverage_study(const std::vector<CoverageCellSpec>& cells,
                                  const CoverageConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const StudyConfig& sc = cfg.study;
    sc.fit.validate();
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw PreconditionError("level must lie in (0,1)");
    CoverageReport rep;
    rep.config = cfg;
    rep.cells = cells;
    const std::size_t reps = static_cast<std::size_t>(std::max(0, sc.replicates));
    rep.records.resize(cells.size() * reps);

    parallel_for(rep.records.size(), sc.threads, [&](std::size_t idx) {
        CoverageRecord& r = rep.records[idx];
        r.cell = static_cast<int>(idx / reps);
        r.replicate = static_cast<int>(idx % reps);
        const CoverageCellSpec& cell = cells[r.cell];
        const int k = cell.order.free_dim();
        const double per_level = 1.0 - (1.0 - cfg.level) / k;
        const double z = boost::math::quantile(boost::math::normal(), 1.0 - (1.0 - per_level) / 2.0);
        const std::vector<double> truth = to_vector(cell.truth, cell.order);
        r.wald_low.assign(k, kNaN);
        r.wald_high.assign(k, kNaN);
        r.profile_low.assign(k, kNaN);
        r.profile_high.assign(k, kNaN);
        try {
            Rng rng = data_rng(sc, idx);
            GeneratorSpec gen;
            gen.order = cell.order;
            gen.params = cell.truth;
            gen.n = cell.n;
            gen.seed = rng();
            const TimeSeries series = simulate(gen);
            const MultistartConfig fit_cfg = replicate_fit_config(sc, idx);
            FitResult fit = fit_multistart(series, cell.order, fit_cfg);
            const FisherResult fisher = fisher_se(fit, series);
            fit.se = fisher.se;
            r.loglik = fit.loglik;
            r.ok = true;

            const std::vector<double> est = to_vector(fit.params, cell.order);
            r.fisher_available = true;
            r.fisher_covered = true;
            for (int i = 0; i < k; ++i) {
                if (!fisher.se[i]) {
                    r.fisher_available = false;
                    r.fisher_covered = false;
                    continue;
                }
                r.wald_low[i] = est[i] - z * *fisher.se[i];
                r.wald_high[i] = est[i] + z * *fisher.se[i];
                if (truth[i] < r.wald_low[i] || truth[i] > r.wald_high[i]) r.fisher_covered = false;
            }

            ProfileConfig pc = cfg.profile;
            pc.level = per_level;
            r.profile_available = true;
            r.profile_covered = true;
            for (int i = 0; i < k; ++i) {
                try {
                    const ProfileCurve curve = profile_ci(series, fit, i, pc, fit_cfg);
                    r.profile_low[i] = curve.lower_open ? -kInf : curve.ci_low;
                    r.profile_high[i] = curve.upper_open ? kInf : curve.ci_high;
                    if (truth[i] < r.profile_low[i] || truth[i] > r.profile_high[i]) {
                        r.profile_covered = false;
                    }
                } catch (const Error&) {
                    r.profile_available = false;
                    r.profile_covered = false;
                }
            }
        } catch (const Error& e) {
            r.ok = false;
            r.error = e.what();
        }
    });

    for (std::size_t c = 0; c < cells.size(); ++c) {
        CoverageCellSummary s;
        s.spec = cells[c];
        int fc = 0, pcov = 0;
        for (std::size_t i = 0; i < reps; ++i) {
            const CoverageRecord& r = rep.records[c * reps + i];
            if (!r.ok) {
                ++s.excluded;
                continue;
            }
            ++s.replicates;
            fc += r.fisher_covered;
            pcov += r.profile_covered;
            s.fisher_unavailable += !r.fisher_available;
            s.profile_unavailable += !r.profile_available;
        }
        if (s.replicates > 0) {
            const double m = s.replicates;
            s.fisher_coverage = fc / m;
            s.profile_coverage = pcov / m;
            s.fisher_mcse = std::sqrt(s.fisher_coverage * (1.0 - s.fisher_coverage) / m);
            s.profile_mcse = std::sqrt(s.profile_coverage * (1.0 - s.profile_coverage) / m);
        } else {
            s.fisher_coverage = s.profile_coverage = s.fisher_mcse = s.profile_mcse = kNaN;
        }
        rep.summary.push_back(s);
    }
    rep.seconds = elapsed(t0);
    return rep;
}

// ---------------------------------------------------------------------------

ConsistencyReport run_consistency_study(const ConsistencyConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const StudyConfig& sc = cfg.study;
    sc.fit.validate();
    if (cfg.windows.empty()) throw PreconditionError("at least one stopping window is required");
    for (int m : cfg.windows) {
        if (m < 1) throw PreconditionError("stopping windows must be >= 1");
    }
    ConsistencyReport rep;
    rep.config = cfg;
    const std::size_t reps = static_cast<std::size_t>(std::max(0, sc.replicates));
    rep.records.resize(reps);
    const int largest = *std::max_element(cfg.windows.begin(), cfg.windows.end());

    parallel_for(reps, sc.threads, [&](std::size_t idx) {
        ConsistencyRecord& r = rep.records[idx];
        r.replicate = static_cast<int>(idx);
        try {
            Rng rng = data_rng(sc, idx);
            const GeneratorSpec gen = random_generator(cfg.generator, rng, cfg.n);
            r.truth = gen.params;
            const TimeSeries series = simulate(gen);
            MultistartConfig fit = replicate_fit_config(sc, idx);
            fit.M = largest;
            const AicTable table = build_aic_table(series, cfg.max_p, cfg.max_q,
                                                   cfg.generator.include_mean, fit);
            for (int m : cfg.windows) {
                // Window 1 is the single-start baseline: start 0 only.
                const std::vector<double> ll =
                    m == 1 ? replay_table_logliks(table, 0, 1, fit.improvement_eps)
                           : replay_table_logliks(table, m, fit.max_starts, fit.improvement_eps);
                const auto v = find_inconsistencies(ll, cfg.max_p, cfg.max_q);
                r.consistent.push_back(v.empty());
                r.violations.push_back(static_cast<int>(v.size()));
            }
            r.ok = true;
        } catch (const Error& e) {
            r.error = e.what();
        }
    });

    rep.consistent_proportion.assign(cfg.windows.size(), 0.0);
    int used = 0;
    for (const auto& r : rep.records) {
        if (!r.ok) {
            ++rep.excluded;
            continue;
        }
        ++used;
        for (std::size_t w = 0; w < cfg.windows.size(); ++w) rep.consistent_proportion[w] += r.consistent[w];
    }
    for (double& v : rep.consistent_proportion) v = used ? v / used : kNaN;
    rep.seconds = elapsed(t0);
    return rep;
}

// ---------------------------------------------------------------------------

Histogram make_histogram(const std::vector<double>& values, int bins) {
    Histogram h;
    if (bins < 1) throw PreconditionError("histogram needs at least one bin");
    std::vector<double> v;
    for (double x : values) {
        if (std::isfinite(x)) v.push_back(x);
    }
    if (v.empty()) return h;
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / bins;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + width * b;
    h.edges.back() = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double x : v) {
        int b = static_cast<int>((x - lo) / width);
        ++h.counts[std::clamp(b, 0, bins - 1)];
    }
    return h;
}

BootstrapReport run_bootstrap_refit(const std::vector<BootstrapModel>& models,
                                    const BootstrapConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const StudyConfig& sc = cfg.study;
    sc.fit.validate();
    BootstrapReport rep;
    rep.config = cfg;
    rep.models = models;
    const std::size_t reps = static_cast<std::size_t>(std::max(0, sc.replicates));
    rep.records.resize(models.size() * reps);

    parallel_for(rep.records.size(), sc.threads, [&](std::size_t idx) {
        BootstrapRecord& r = rep.records[idx];
        r.model = static_cast<int>(idx / reps);
        r.replicate = static_cast<int>(idx % reps);
        const BootstrapModel& model = models[r.model];
        try {
            Rng rng = data_rng(sc, idx);
            GeneratorSpec gen;
            gen.order = model.order;
            gen.params = model.params;
            gen.n = cfg.n;
            gen.seed = rng();
            const TimeSeries series = simulate(gen);
            const FitResult fit = fit_multistart(series, cfg.refit, replicate_fit_config(sc, idx));
            r.estimates = to_vector(fit.params, cfg.refit);
            r.loglik = fit.loglik;
            r.ok = true;
        } catch (const Error& e) {
            r.error = e.what();
        }
    });

    const auto names = parameter_names(cfg.refit);
    for (std::size_t m = 0; m < models.size(); ++m) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            std::vector<double> vals;
            for (std::size_t i = 0; i < reps; ++i) {
                const BootstrapRecord& r = rep.records[m * reps + i];
                if (r.ok) vals.push_back(r.estimates[j]);
            }
            Histogram h = make_histogram(vals, cfg.bins);
            h.model = models[m].label;
            h.parameter = names[j];
            rep.histograms.push_back(std::move(h));
        }
    }
    rep.seconds = elapsed(t0);
    return rep;
}

// ---------------------------------------------------------------------------

std::vector<NestedLrRecord> run_nested_lr_study(const GeneratorSpec& generator,
                                                const ArmaOrder& small, const ArmaOrder& large,
                                                const StudyConfig& cfg) {
    if (small.p > large.p || small.q > large.q || small.include_mean != large.include_mean) {
        throw PreconditionError("models are not nested");
    }
    cfg.fit.validate();
    generator.validate();
    std::vector<NestedLrRecord> out(static_cast<std::size_t>(std::max(0, cfg.replicates)));
    parallel_for(out.size(), cfg.threads, [&](std::size_t idx) {
        NestedLrRecord& r = out[idx];
        r.replicate = static_cast<int>(idx);
        try {
            Rng rng = data_rng(cfg, idx);
            GeneratorSpec gen = generator;
            gen.seed = rng();
            const TimeSeries series = simulate(gen);
            const MultistartConfig fit = replicate_fit_config(cfg, idx);
            r.loglik_small = fit_multistart(series, small, fit).loglik;
            r.loglik_large = fit_multistart(series, large, fit).loglik;
            r.delta = r.loglik_large - r.loglik_small;
            r.ok = true;
        } catch (const Error&) {
            r.ok = false;
        }
    });
    return out;
}

}  // namespace armamle
