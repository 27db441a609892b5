#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "armamle/core.hpp"
#include "armamle/multistart.hpp"

namespace armamle {

/// -2 loglik + 2 d, with d = p + q + 1 (+1 with a mean).
double aic(double loglik, const ArmaOrder& order);

// ---------------------------------------------------------------------------
// Fisher standard errors
// ---------------------------------------------------------------------------

struct FisherResult {
    /// Aligned with to_vector; absent where the information is unusable.
    std::vector<std::optional<double>> se;
    /// Observed information (negative Hessian of the log-likelihood).
    Eigen::MatrixXd information;
    /// Information matrix is not positive definite.
    bool singular = false;
    /// Stencil hit the invalid region, or an inverted root is within
    /// kNearUnitRoot of the unit circle.
    bool boundary = false;
    std::vector<std::string> warnings;
};

inline constexpr double kNearUnitRoot = 0.99;

/// Inverse observed information from a centered finite-difference Hessian of
/// the concentrated log-likelihood (step `rel_step` * max(1, |x_i|)).
FisherResult fisher_se(const FitResult& fit, const TimeSeries& series, double rel_step = 1e-4);

// ---------------------------------------------------------------------------
// Likelihood-ratio helpers
// ---------------------------------------------------------------------------

class InconsistentNestingError : public Error {
public:
    using Error::Error;
};

/// chi2_df(level) / 2: the log-likelihood drop defining a Wilks interval/test.
double lr_cutoff(double level, int df = 1);

struct LrTest {
    double delta = 0.0;
    double p_value = 1.0;
};

/// delta = ll1 - ll0 and the upper-tail chi2_df probability of 2 delta.
/// Throws InconsistentNestingError if ll1 < ll0 - 1e-6.
LrTest lr_test(double ll0, double ll1, int df);

// ---------------------------------------------------------------------------
// Profile likelihood intervals
// ---------------------------------------------------------------------------

struct ProfileConfig {
    double level = 0.95;
    /// Points in the initial grid (odd, centred on the MLE).
    int min_points = 41;
    /// Initial half-width in Fisher standard errors.
    double span_se = 6.0;
    /// Half-width used when no standard error is available.
    double fallback_half_width = 0.5;
    /// Extra half-grids appended per side while the cutoff is not crossed.
    int max_widenings = 4;
    /// Stopping window and cap of the per-point multistart.
    int inner_M = 3;
    int inner_max_starts = 12;
    int threads = 1;
};

struct ProfileCurve {
    int parameter_id = 0;
    std::string parameter_name;
    double mle_value = 0.0;
    double mle_loglik = 0.0;
    std::vector<double> grid;
    std::vector<double> profile_loglik;
    double cutoff = 0.0;  // drop from the curve maximum defining the interval
    double ci_low = 0.0;
    double ci_high = 0.0;
    /// The interval is truncated by the validity boundary or the grid end.
    bool lower_open = false;
    bool upper_open = false;
    int dropped_points = 0;
};

/// Profiles coordinate `parameter_id` of to_vector around the fitted MLE,
/// re-maximizing the remaining coordinates with a small multistart at each
/// grid value. The interval is the hull of grid values whose profile
/// log-likelihood is within `cutoff` of the curve maximum, with linearly
/// interpolated endpoints.
ProfileCurve profile_ci(const TimeSeries& series, const FitResult& fit, int parameter_id,
                        const ProfileConfig& pcfg, const MultistartConfig& base);

// ---------------------------------------------------------------------------
// AIC tables
// ---------------------------------------------------------------------------

enum class FitArm { Multistart, Single };

struct AicCell {
    int p = 0;
    int q = 0;
    std::optional<FitResult> fit;
    std::string error;
};

struct NestedViolation {
    std::pair<int, int> smaller;  // (p, q) with the larger log-likelihood
    std::pair<int, int> larger;
    double loglik_gap = 0.0;
};

inline constexpr double kNestingTol = 1e-6;
inline constexpr int kMaxTableOrder = 6;

struct AicTable {
    int max_p = 0;
    int max_q = 0;
    bool include_mean = false;
    std::vector<AicCell> cells;  // row-major over p, then q
    std::vector<NestedViolation> inconsistencies;

    const AicCell& at(int p, int q) const { return cells.at(p * (max_q + 1) + q); }
    bool consistent() const noexcept { return inconsistencies.empty(); }
    /// Cells appearing in at least one violation.
    bool implicated(int p, int q) const;
    /// Order minimizing AIC among fitted cells.
    std::optional<std::pair<int, int>> best() const;
};

/// All nested pairs (p1 <= p2, q1 <= q2) with loglik(p1,q1) > loglik(p2,q2) + tol.
/// `loglik` is row-major (max_p+1) x (max_q+1); NaN marks a missing cell.
std::vector<NestedViolation> find_inconsistencies(const std::vector<double>& loglik, int max_p,
                                                  int max_q, double tol = kNestingTol);

AicTable build_aic_table(const TimeSeries& series, int max_p, int max_q, bool include_mean,
                         const MultistartConfig& cfg, FitArm arm = FitArm::Multistart);

/// Rebuilds a table from fits already in `table` as if they had been run with
/// a different stopping window (see replay_stopping). M = 0 keeps start 0 only.
std::vector<double> replay_table_logliks(const AicTable& table, int M, int max_starts,
                                         double improvement_eps);

/// Grid text in the usual AR-rows / MA-columns layout; implicated cells carry '*'.
std::string render_aic_table(const AicTable& table, int decimals = 3);

}  // namespace armamle
