#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "armamle/core.hpp"
#include "armamle/kernels.hpp"

namespace armamle {

/// Harvey-form state space: z_t = T z_{t-1} + Q w_t, x_t = z_t[0].
/// T has (phi_1..phi_r) in its first column and ones on the superdiagonal;
/// Q = (1, theta_1, ..., theta_{r-1})'. Coefficients beyond the model order
/// are zero.
struct StateSpace {
    int r = 1;
    Eigen::MatrixXd T;
    Eigen::VectorXd Q;
    std::vector<double> phi_ext;    // length r
    std::vector<double> theta_ext;  // length r - 1
};

StateSpace build_state_space(const ArmaParams& params, const ArmaOrder& order);

/// Solves P = T P T' + sigma2 Q Q' through (I - T (x) T) vec(P) = vec(sigma2 Q Q').
/// Throws StationaryInitError when the AR part is not causal.
Eigen::MatrixXd stationary_covariance(const StateSpace& ss, double sigma2 = 1.0);

struct FilterOutput {
    double loglik = 0.0;
    std::vector<double> innovations;           // NaN at missing indices
    std::vector<double> innovation_variances;  // F_t on the sigma2 scale used
    double sigma2_hat = 0.0;                   // (1/n_obs) sum e_t^2 / F_t
    int n_obs = 0;
};

/// Exact Gaussian log-likelihood via the Kalman filter, with stationary
/// initialization and mean subtraction. Missing indices skip the update.
///
/// With `concentrate`, sigma2 is replaced by its maximizer and params.sigma2
/// is ignored. The full -(n_obs/2) log(2 pi) constant is always included.
FilterOutput kalman_loglik(const TimeSeries& series, const ArmaParams& params,
                           const ArmaOrder& order, bool concentrate);

/// Conditional sum of squares: sum_{t=p+1}^{n} w_t^2 with w_t = 0 for t <= p.
/// Throws UnsupportedGapError if the series has missing values.
double css_objective(const TimeSeries& series, const ArmaParams& params, const ArmaOrder& order);

/// Concentrated log-likelihood of (phi, theta, [mean]) coordinate vectors for a
/// fixed series and order. Invalid (non-causal, non-invertible) or degenerate
/// points evaluate to -inf. Points can be evaluated in lane batches.
class LoglikEvaluator {
public:
    LoglikEvaluator(const TimeSeries& series, const ArmaOrder& order);

    const ArmaOrder& order() const noexcept { return order_; }
    const TimeSeries& series() const noexcept { return *series_; }

    double operator()(std::span<const double> x) const;

    /// out[i] = (*this)(points[i]); uses the SIMD batch kernel.
    void evaluate(std::span<const std::vector<double>> points, std::span<double> out) const;

    /// Concentrated sigma2 estimate at x; NaN if x is invalid.
    double sigma2_hat(std::span<const double> x) const;

private:
    struct Prepared {
        bool valid = false;
        std::vector<double> phi, q, p0;
        double mean = 0.0;
    };
    Prepared prepare(std::span<const double> x) const;
    double finish(const kernels::FilterSums& sums) const;

    const TimeSeries* series_;
    ArmaOrder order_;
    kernels::SeriesView view_;
};

}  // namespace armamle
