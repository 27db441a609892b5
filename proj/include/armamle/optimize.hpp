#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "armamle/core.hpp"
#include "armamle/likelihood.hpp"

namespace armamle {

enum class OptimizerMethod { QuasiNewton, Simplex };

const char* method_name(OptimizerMethod m);

struct OptimizerConfig {
    int max_iters = 500;
    /// Finite-difference step, relative to max(1, |x_i|).
    double grad_step = 1e-6;
    /// Stop when |f_k - f_{k+1}| <= tol * (|f_{k+1}| + tol).
    double tol = 1e-8;
    OptimizerMethod method = OptimizerMethod::QuasiNewton;

    void validate() const;
};

struct OptimizeOutcome {
    ArmaParams params;
    /// Log-likelihood at params (sigma2 concentrated).
    double objective = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    /// Quasi-Newton curvature estimate of the negative log-likelihood over the
    /// free coordinates.
    std::optional<Eigen::MatrixXd> approx_hessian;
};

// ---------------------------------------------------------------------------
// Generic minimizers. Objectives return +inf outside the feasible region.
// ---------------------------------------------------------------------------

using ScalarObjective = std::function<double(std::span<const double>)>;
/// Evaluates many points at once; out.size() == points.size().
using BatchObjective =
    std::function<void(std::span<const std::vector<double>>, std::span<double>)>;

struct MinimizeResult {
    std::vector<double> x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    Eigen::MatrixXd hessian;  // inverse of the final inverse-Hessian estimate
};

/// Central differences with step h_i = step * max(1, |x_i|); falls back to a
/// one-sided difference (using fx) when one side is infeasible, and to 0 when
/// both are.
std::vector<double> fd_gradient(const BatchObjective& f, std::span<const double> x, double fx,
                                double step);

MinimizeResult minimize_bfgs(const ScalarObjective& f, const BatchObjective& fb,
                             std::vector<double> x0, const OptimizerConfig& cfg);

MinimizeResult minimize_nelder_mead(const ScalarObjective& f, std::vector<double> x0,
                                    const OptimizerConfig& cfg);

// ---------------------------------------------------------------------------
// ARMA-specific drivers
// ---------------------------------------------------------------------------

/// Maximizes the concentrated log-likelihood from `init` over (phi, theta,
/// [mean]). Coordinates listed in `fixed` (indices into to_vector) are held at
/// their init values. Trial points failing validate_params score -inf.
/// Throws PreconditionError if init is not causal and invertible.
OptimizeOutcome maximize_loglik(const LoglikEvaluator& eval, const ArmaParams& init,
                                const OptimizerConfig& cfg, std::span<const int> fixed = {});

OptimizeOutcome maximize_loglik(const TimeSeries& series, const ArmaParams& init,
                                const ArmaOrder& order, const OptimizerConfig& cfg);

/// Gradient of the concentrated log-likelihood (not its negative).
std::vector<double> loglik_gradient(const LoglikEvaluator& eval, std::span<const double> x,
                                    double step = 1e-6);

struct CssResult {
    ArmaParams params;
    double css = 0.0;
    bool converged = false;
    /// The CSS minimizer was not causal/invertible and was replaced by zeros.
    bool fallback = false;
};

/// Minimizes css_objective from the zero vector (mean starts at the sample
/// mean). sigma2 = CSS / (n - p). Throws UnsupportedGapError on missing data.
CssResult minimize_css(const TimeSeries& series, const ArmaOrder& order,
                       const OptimizerConfig& cfg);

/// phi = theta = 0, mean = sample mean, sigma2 = sample variance.
ArmaParams zero_params(const TimeSeries& series, const ArmaOrder& order);

}  // namespace armamle
