#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace armamle {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class InvalidSeriesError : public Error {
public:
    using Error::Error;
};

/// Raised by the stationary initialization when the AR part is not causal.
class StationaryInitError : public Error {
public:
    using Error::Error;
};

/// A prediction-error variance F_t <= 0 (or non-finite) was produced.
class NumericalDegeneracyError : public Error {
public:
    using Error::Error;
};

/// CSS does not support gaps in the series.
class UnsupportedGapError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Observed series x_1..x_n with an optional missing mask.
///
/// Missing entries are stored as NaN in values() and flagged in the mask; the
/// likelihood skips the update step at those indices.
class TimeSeries {
public:
    /// All values observed. Throws InvalidSeriesError on empty input or
    /// non-finite values.
    explicit TimeSeries(std::vector<double> values);

    /// `missing[i] == true` marks index i as unobserved; the value there is
    /// ignored. At least one index must be observed.
    TimeSeries(std::vector<double> values, std::vector<bool> missing);

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    /// 1 where observed, 0 where missing.
    std::span<const std::uint8_t> observed() const noexcept { return observed_; }
    bool is_missing(std::size_t i) const { return observed_.at(i) == 0; }
    bool has_missing() const noexcept { return n_observed_ != values_.size(); }
    std::size_t n_observed() const noexcept { return n_observed_; }

    double mean() const;
    /// Variance over observed values (divisor n_obs); 0 for a single value.
    double variance() const;

private:
    std::vector<double> values_;
    std::vector<std::uint8_t> observed_;
    std::size_t n_observed_ = 0;
};

struct ArmaOrder {
    int p = 0;
    int q = 0;
    bool include_mean = false;

    ArmaOrder() = default;
    ArmaOrder(int p_, int q_, bool mean = false);

    /// Number of likelihood parameters counted by AIC: p + q + sigma2 (+ mean).
    int aic_dim() const noexcept { return p + q + 1 + (include_mean ? 1 : 0); }
    /// Dimension of the optimized vector (phi, theta, [mean]); sigma2 is
    /// concentrated out.
    int free_dim() const noexcept { return p + q + (include_mean ? 1 : 0); }
    /// State dimension max(p, q + 1).
    int state_dim() const noexcept { return p > q + 1 ? p : q + 1; }

    bool operator==(const ArmaOrder&) const = default;
};

std::string to_string(const ArmaOrder& order);

struct ArmaParams {
    std::vector<double> phi;
    std::vector<double> theta;
    double sigma2 = 1.0;
    double mean = 0.0;

    bool operator==(const ArmaParams&) const = default;
};

/// Throws DimensionError unless phi/theta lengths match the order.
void check_dimensions(const ArmaParams& params, const ArmaOrder& order);

/// Flattens to the optimizer's coordinate vector (phi..., theta..., [mean]).
std::vector<double> to_vector(const ArmaParams& params, const ArmaOrder& order);

/// Inverse of to_vector; sigma2 is taken from `sigma2`.
ArmaParams from_vector(std::span<const double> x, const ArmaOrder& order,
                       double sigma2 = 1.0);

/// Coordinate names aligned with to_vector: "phi1", ..., "theta1", ..., "mean".
std::vector<std::string> parameter_names(const ArmaOrder& order);

/// Index into to_vector for a name such as "theta1"; nullopt if unknown.
std::optional<int> parameter_index(const ArmaOrder& order, const std::string& name);

struct ValidityReport {
    bool causal = false;
    bool invertible = false;
    bool positive_variance = false;

    bool ok() const noexcept { return causal && invertible && positive_variance; }
};

/// Roots with modulus within this margin above 1 count as on the boundary.
inline constexpr double kRootBoundaryTol = 1e-8;

/// Causality, invertibility and sigma2 > 0, via a Schur-Cohn stability test.
/// Throws DimensionError when vector lengths do not match the order.
ValidityReport validate_params(const ArmaParams& params, const ArmaOrder& order);

struct FitResult {
    ArmaOrder order;
    ArmaParams params;
    double loglik = 0.0;
    double aic = 0.0;
    int n_starts_used = 0;
    std::vector<double> per_start_logliks;
    bool converged = false;
    /// Index of the start that produced the returned estimate.
    int best_start = 0;
    /// True when the CSS start was replaced by the zero vector.
    bool css_fallback = false;
    /// Fisher standard errors aligned with to_vector; entries may be absent.
    std::optional<std::vector<std::optional<double>>> se;
};

}  // namespace armamle
