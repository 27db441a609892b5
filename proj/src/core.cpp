#include "armamle/core.hpp"

#include <cmath>
#include <sstream>

#include "armamle/poly.hpp"

namespace armamle {

TimeSeries::TimeSeries(std::vector<double> values)
    : TimeSeries(std::move(values), {}) {}

TimeSeries::TimeSeries(std::vector<double> values, std::vector<bool> missing)
    : values_(std::move(values)) {
    if (values_.empty()) {
        throw InvalidSeriesError("time series is empty");
    }
    if (!missing.empty() && missing.size() != values_.size()) {
        throw DimensionError("missing mask length does not match series length");
    }
    observed_.assign(values_.size(), 1);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const bool miss = !missing.empty() && missing[i];
        if (miss) {
            observed_[i] = 0;
            values_[i] = std::nan("");
            continue;
        }
        if (!std::isfinite(values_[i])) {
            std::ostringstream msg;
            msg << "non-finite observation at index " << i;
            throw InvalidSeriesError(msg.str());
        }
        ++n_observed_;
    }
    if (n_observed_ == 0) {
        throw InvalidSeriesError("time series has no observed values");
    }
}

double TimeSeries::mean() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (observed_[i]) sum += values_[i];
    }
    return sum / static_cast<double>(n_observed_);
}

double TimeSeries::variance() const {
    const double m = mean();
    double ss = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (observed_[i]) ss += (values_[i] - m) * (values_[i] - m);
    }
    return ss / static_cast<double>(n_observed_);
}

ArmaOrder::ArmaOrder(int p_, int q_, bool mean) : p(p_), q(q_), include_mean(mean) {
    if (p < 0 || q < 0) {
        throw DimensionError("ARMA orders must be non-negative");
    }
}

std::string to_string(const ArmaOrder& order) {
    std::ostringstream out;
    out << "ARMA(" << order.p << "," << order.q << ")" << (order.include_mean ? "+mean" : "");
    return out.str();
}

void check_dimensions(const ArmaParams& params, const ArmaOrder& order) {
    if (static_cast<int>(params.phi.size()) != order.p ||
        static_cast<int>(params.theta.size()) != order.q) {
        std::ostringstream msg;
        msg << "parameter lengths (" << params.phi.size() << "," << params.theta.size()
            << ") do not match " << to_string(order);
        throw DimensionError(msg.str());
    }
}

std::vector<double> to_vector(const ArmaParams& params, const ArmaOrder& order) {
    check_dimensions(params, order);
    std::vector<double> x;
    x.reserve(order.free_dim());
    x.insert(x.end(), params.phi.begin(), params.phi.end());
    x.insert(x.end(), params.theta.begin(), params.theta.end());
    if (order.include_mean) x.push_back(params.mean);
    return x;
}

ArmaParams from_vector(std::span<const double> x, const ArmaOrder& order, double sigma2) {
    if (static_cast<int>(x.size()) != order.free_dim()) {
        throw DimensionError("parameter vector length does not match order");
    }
    ArmaParams out;
    out.phi.assign(x.begin(), x.begin() + order.p);
    out.theta.assign(x.begin() + order.p, x.begin() + order.p + order.q);
    out.mean = order.include_mean ? x[order.p + order.q] : 0.0;
    out.sigma2 = sigma2;
    return out;
}

std::vector<std::string> parameter_names(const ArmaOrder& order) {
    std::vector<std::string> names;
    for (int i = 1; i <= order.p; ++i) names.push_back("phi" + std::to_string(i));
    for (int j = 1; j <= order.q; ++j) names.push_back("theta" + std::to_string(j));
    if (order.include_mean) names.emplace_back("mean");
    return names;
}

std::optional<int> parameter_index(const ArmaOrder& order, const std::string& name) {
    const auto names = parameter_names(order);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return static_cast<int>(i);
    }
    return std::nullopt;
}

ValidityReport validate_params(const ArmaParams& params, const ArmaOrder& order) {
    check_dimensions(params, order);
    ValidityReport report;
    const double radius = 1.0 + kRootBoundaryTol;
    report.causal = poly::roots_outside(params.phi, poly::Kind::AR, radius);
    report.invertible = poly::roots_outside(params.theta, poly::Kind::MA, radius);
    report.positive_variance = params.sigma2 > 0.0 && std::isfinite(params.sigma2);
    return report;
}

}  // namespace armamle
