#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "armamle/core.hpp"
#include "armamle/inference.hpp"
#include "armamle/multistart.hpp"
#include "armamle/sampler.hpp"

namespace armamle {

// ---------------------------------------------------------------------------
// Data generation
// ---------------------------------------------------------------------------

struct GeneratorSpec {
    ArmaOrder order;
    ArmaParams params;
    int n = 100;
    int burn_in = 1000;
    std::uint64_t seed = 1;

    /// Throws PreconditionError for n < 1, burn_in < 0 or invalid params.
    void validate() const;
};

/// Gaussian innovations with variance params.sigma2; the recursion starts
/// from zeros and the first burn_in values are discarded.
TimeSeries simulate(const GeneratorSpec& spec);

inline constexpr double kGeneratorMinDistance = 0.1;

/// Draws generator parameters from the root sampler with cross distance
/// >= 0.1 and moduli in [0.05, 0.95]; sigma2 = 1, mean = 0. The simulation
/// seed is taken from `rng`.
GeneratorSpec random_generator(const ArmaOrder& order, Rng& rng, int n);

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

/// Shared settings. Replicate i uses the streams (seed, i): one for the data
/// and an offset sampler seed for the multistart, so results do not depend
/// on the worker count.
struct StudyConfig {
    int replicates = 100;
    std::uint64_t seed = 20240101;
    MultistartConfig fit;
    int threads = 1;
};

/// Multistart sampler seed used for replicate `index` of a study.
std::uint64_t replicate_sampler_seed(std::uint64_t study_seed, std::uint64_t index);

struct ImprovementCellSpec {
    int p = 1;
    int q = 1;
    int n = 100;
};

struct ImprovementRecord {
    int cell = 0;
    int replicate = 0;
    bool ok = false;
    std::string error;
    ArmaParams truth;
    double loglik_single = 0.0;
    double loglik_multi = 0.0;
    double delta = 0.0;
    bool improved = false;
    int n_starts = 0;
};

struct ImprovementCellSummary {
    ImprovementCellSpec spec;
    int replicates = 0;
    int excluded = 0;
    int improved = 0;
    double proportion = 0.0;
    /// Quantiles of delta among improved replicates (NaN when none).
    double delta_q25 = 0.0;
    double delta_median = 0.0;
    double delta_q75 = 0.0;
};

struct ImprovementReport {
    StudyConfig config;
    std::vector<ImprovementCellSpec> cells;
    std::vector<ImprovementRecord> records;
    std::vector<ImprovementCellSummary> summary;
    double seconds = 0.0;
};

/// Per replicate: draw a generator at the cell's order, simulate, fit with a
/// single start and with multistart at the true order (no mean term).
ImprovementReport run_improvement_study(const std::vector<ImprovementCellSpec>& cells,
                                        const StudyConfig& cfg);

struct CoverageCellSpec {
    std::string label;
    ArmaOrder order;
    ArmaParams truth;
    int n = 100;
};

struct CoverageRecord {
    int cell = 0;
    int replicate = 0;
    bool ok = false;
    std::string error;
    double loglik = 0.0;
    bool fisher_available = false;
    bool fisher_covered = false;
    bool profile_available = false;
    bool profile_covered = false;
    /// Per coordinate of to_vector: Wald and profile interval bounds.
    std::vector<double> wald_low, wald_high, profile_low, profile_high;
};

struct CoverageCellSummary {
    CoverageCellSpec spec;
    int replicates = 0;
    int excluded = 0;
    int fisher_unavailable = 0;
    int profile_unavailable = 0;
    double fisher_coverage = 0.0;
    double fisher_mcse = 0.0;
    double profile_coverage = 0.0;
    double profile_mcse = 0.0;
};

struct CoverageConfig {
    StudyConfig study;
    double level = 0.95;
    ProfileConfig profile;
};

struct CoverageReport {
    CoverageConfig config;
    std::vector<CoverageCellSpec> cells;
    std::vector<CoverageRecord> records;
    std::vector<CoverageCellSummary> summary;
    double seconds = 0.0;
};

/// Joint coverage of all coordinates of to_vector by Bonferroni-adjusted
/// intervals (per-coordinate level 1 - (1 - level)/k). A Wald interval with a
/// missing standard error, or a profile that fails, counts as not covering
/// and is tallied separately. An open profile side extends to infinity.
CoverageReport run_coverage_study(const std::vector<CoverageCellSpec>& cells,
                                  const CoverageConfig& cfg);

struct ConsistencyConfig {
    StudyConfig study;
    ArmaOrder generator{2, 1};
    int n = 100;
    int max_p = 3;
    int max_q = 3;
    /// Stopping windows compared; 1 is the single-start baseline.
    std::vector<int> windows{1, 3, 10};
};

struct ConsistencyRecord {
    int replicate = 0;
    bool ok = false;
    std::string error;
    ArmaParams truth;
    /// Aligned with windows.
    std::vector<bool> consistent;
    std::vector<int> violations;
};

struct ConsistencyReport {
    ConsistencyConfig config;
    std::vector<ConsistencyRecord> records;
    std::vector<double> consistent_proportion;  // aligned with windows
    int excluded = 0;
    double seconds = 0.0;
};

/// Each table is fitted once with the largest window; smaller windows are
/// replays of the recorded per-start traces, which reproduce those runs
/// exactly because starts are seeded by index.
ConsistencyReport run_consistency_study(const ConsistencyConfig& cfg);

struct BootstrapModel {
    std::string label;
    ArmaOrder order;
    ArmaParams params;
};

struct BootstrapConfig {
    StudyConfig study;
    int n = 100;
    ArmaOrder refit;
    int bins = 40;
};

struct BootstrapRecord {
    int model = 0;
    int replicate = 0;
    bool ok = false;
    std::string error;
    std::vector<double> estimates;  // to_vector of the refit
    double loglik = 0.0;
};

struct Histogram {
    std::string model;
    std::string parameter;
    std::vector<double> edges;  // bins + 1
    std::vector<int> counts;
};

struct BootstrapReport {
    BootstrapConfig config;
    std::vector<BootstrapModel> models;
    std::vector<BootstrapRecord> records;
    std::vector<Histogram> histograms;
    double seconds = 0.0;
};

/// For each model: simulate replicates of length n and refit config.refit.
BootstrapReport run_bootstrap_refit(const std::vector<BootstrapModel>& models,
                                    const BootstrapConfig& cfg);

/// Equal-width histogram over [min, max] of the finite values.
Histogram make_histogram(const std::vector<double>& values, int bins);

struct NestedLrRecord {
    int replicate = 0;
    bool ok = false;
    double loglik_small = 0.0;
    double loglik_large = 0.0;
    double delta = 0.0;
};

/// Simulates from `generator`, fits `small` and `large` (nested) by
/// multistart and records delta = ll_large - ll_small.
std::vector<NestedLrRecord> run_nested_lr_study(const GeneratorSpec& generator,
                                                const ArmaOrder& small, const ArmaOrder& large,
                                                const StudyConfig& cfg);

/// Quantile with linear interpolation (type 7); NaN for empty input.
double quantile(std::vector<double> values, double prob);

}  // namespace armamle
