#pragma once

#include <span>

#include "armamle/core.hpp"
#include "armamle/optimize.hpp"
#include "armamle/sampler.hpp"

namespace armamle {

struct MultistartConfig {
    /// Stop after this many consecutive sampled starts fail to improve.
    int M = 10;
    /// Hard cap on starts, counting the CSS start.
    int max_starts = 200;
    /// An improvement must exceed the incumbent by more than this.
    double improvement_eps = 1e-5;
    SamplerConfig sampler;
    OptimizerConfig optimizer;
    /// Workers for concurrent restarts; 1 runs serially.
    int threads = 1;

    void validate() const;
};

/// CSS start (zero vector when CSS is unavailable or invalid), then sampled
/// restarts until the last M fail to improve the incumbent or max_starts is
/// reached. Returns the best start. Start k >= 1 draws from its own stream
/// seeded with sampler.seed + k, so results do not depend on `threads`.
FitResult fit_multistart(const TimeSeries& series, const ArmaOrder& order,
                         const MultistartConfig& cfg);

/// The CSS-initialized start alone: fit_multistart with max_starts = 1.
FitResult fit_single(const TimeSeries& series, const ArmaOrder& order,
                     const MultistartConfig& cfg);

struct StopReplay {
    int n_starts = 0;
    int best_start = 0;
    double loglik = 0.0;
};

/// Applies the stopping rule to a recorded per-start trace. Because every
/// start is seeded by its index, replaying a longer run's trace with a smaller
/// window reproduces the shorter run exactly.
StopReplay replay_stopping(std::span<const double> per_start_logliks, int M, int max_starts,
                           double improvement_eps);

}  // namespace armamle
