#include "armamle/likelihood.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <numbers>

#include "armamle/poly.hpp"

namespace armamle {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double concentrated_loglik(double sumsq, double sum_log_f, int n_obs) {
    const double n = static_cast<double>(n_obs);
    const double s2 = sumsq / n;
    return -0.5 * n * (kLog2Pi + std::log(s2) + 1.0) - 0.5 * sum_log_f;
}

}  // namespace

StateSpace build_state_space(const ArmaParams& params, const ArmaOrder& order) {
    check_dimensions(params, order);
    StateSpace ss;
    ss.r = order.state_dim();
    if (ss.r > kernels::kMaxState) {
        throw DimensionError("state dimension exceeds the supported maximum");
    }
    ss.phi_ext.assign(ss.r, 0.0);
    ss.theta_ext.assign(ss.r - 1, 0.0);
    std::copy(params.phi.begin(), params.phi.end(), ss.phi_ext.begin());
    std::copy(params.theta.begin(), params.theta.end(), ss.theta_ext.begin());

    ss.T = Eigen::MatrixXd::Zero(ss.r, ss.r);
    for (int i = 0; i < ss.r; ++i) ss.T(i, 0) = ss.phi_ext[i];
    for (int i = 0; i + 1 < ss.r; ++i) ss.T(i, i + 1) = 1.0;
    ss.Q = Eigen::VectorXd::Zero(ss.r);
    ss.Q(0) = 1.0;
    for (int j = 0; j + 1 < ss.r; ++j) ss.Q(j + 1) = ss.theta_ext[j];
    return ss;
}

Eigen::MatrixXd stationary_covariance(const StateSpace& ss, double sigma2) {
    if (!poly::roots_outside(ss.phi_ext, poly::Kind::AR, 1.0 + kRootBoundaryTol)) {
        throw StationaryInitError("AR polynomial is not causal; no stationary initialization");
    }
    const int r = ss.r;
    const int m = r * r;
    // Column-major vec: vec(T P T') = (T kron T) vec(P).
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) {
            const double tij = ss.T(i, j);
            if (tij == 0.0) continue;
            A.block(i * r, j * r, r, r) -= tij * ss.T;
        }
    }
    const Eigen::MatrixXd QQ = sigma2 * ss.Q * ss.Q.transpose();
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(QQ.data(), m);
    const Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
    Eigen::MatrixXd P = Eigen::Map<const Eigen::MatrixXd>(sol.data(), r, r);
    P = 0.5 * (P + P.transpose());
    if (!P.allFinite()) {
        throw StationaryInitError("stationary covariance is not finite");
    }
    return P;
}

FilterOutput kalman_loglik(const TimeSeries& series, const ArmaParams& params,
                           const ArmaOrder& order, bool concentrate) {
    const StateSpace ss = build_state_space(params, order);
    if (!concentrate && !(params.sigma2 > 0.0)) {
        throw PreconditionError("sigma2 must be positive");
    }
    const Eigen::MatrixXd P0 = stationary_covariance(ss, 1.0);

    std::vector<double> q(ss.Q.data(), ss.Q.data() + ss.r);
    std::vector<double> p0(static_cast<std::size_t>(ss.r * ss.r));
    for (int i = 0; i < ss.r; ++i) {
        for (int j = 0; j < ss.r; ++j) p0[i * ss.r + j] = P0(i, j);
    }
    kernels::LaneModel lane{ss.r, ss.phi_ext, q, p0, order.include_mean ? params.mean : 0.0};
    kernels::FilterTrace trace;
    const auto sums = kernels::filter_scalar({series.values(), series.observed()}, lane, &trace);
    if (sums.degenerate) {
        throw NumericalDegeneracyError("non-positive prediction error variance");
    }

    FilterOutput out;
    out.n_obs = sums.n_obs;
    out.sigma2_hat = sums.sumsq / static_cast<double>(sums.n_obs);
    double scale = 1.0;
    if (concentrate) {
        if (!(out.sigma2_hat > 0.0)) {
            throw NumericalDegeneracyError("concentrated innovation variance is zero");
        }
        out.loglik = concentrated_loglik(sums.sumsq, sums.sum_log_f, sums.n_obs);
        scale = out.sigma2_hat;
    } else {
        const double n = static_cast<double>(sums.n_obs);
        out.loglik = -0.5 * (n * (kLog2Pi + std::log(params.sigma2)) + sums.sum_log_f +
                             sums.sumsq / params.sigma2);
        scale = params.sigma2;
    }
    out.innovations = std::move(trace.innovations);
    out.innovation_variances = std::move(trace.variances);
    for (double& f : out.innovation_variances) f *= scale;
    return out;
}

double css_objective(const TimeSeries& series, const ArmaParams& params, const ArmaOrder& order) {
    check_dimensions(params, order);
    if (series.has_missing()) {
        throw UnsupportedGapError("CSS is not defined for series with missing values");
    }
    const auto x = series.values();
    const int n = static_cast<int>(x.size());
    const int p = order.p;
    const int q = order.q;
    const double mu = order.include_mean ? params.mean : 0.0;

    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    double ss = 0.0;
    for (int t = p; t < n; ++t) {
        double wt = x[t] - mu;
        for (int i = 1; i <= p; ++i) wt -= params.phi[i - 1] * (x[t - i] - mu);
        for (int j = 1; j <= q && t - j >= p; ++j) wt -= params.theta[j - 1] * w[t - j];
        w[t] = wt;
        ss += wt * wt;
    }
    return ss;
}

LoglikEvaluator::LoglikEvaluator(const TimeSeries& series, const ArmaOrder& order)
    : series_(&series), order_(order), view_{series.values(), series.observed()} {
    if (order.state_dim() > kernels::kMaxState) {
        throw DimensionError("state dimension exceeds the supported maximum");
    }
}

LoglikEvaluator::Prepared LoglikEvaluator::prepare(std::span<const double> x) const {
    Prepared out;
    for (double v : x) {
        if (!std::isfinite(v)) return out;
    }
    const ArmaParams params = from_vector(x, order_);
    if (!validate_params(params, order_).ok()) return out;

    const StateSpace ss = build_state_space(params, order_);
    Eigen::MatrixXd P0;
    try {
        P0 = stationary_covariance(ss, 1.0);
    } catch (const StationaryInitError&) {
        return out;
    }
    out.phi = ss.phi_ext;
    out.q.assign(ss.Q.data(), ss.Q.data() + ss.r);
    out.p0.resize(static_cast<std::size_t>(ss.r * ss.r));
    for (int i = 0; i < ss.r; ++i) {
        for (int j = 0; j < ss.r; ++j) out.p0[i * ss.r + j] = P0(i, j);
    }
    out.mean = params.mean;
    out.valid = true;
    return out;
}

double LoglikEvaluator::finish(const kernels::FilterSums& sums) const {
    if (sums.degenerate || !(sums.sumsq > 0.0) || !std::isfinite(sums.sumsq) ||
        !std::isfinite(sums.sum_log_f)) {
        return -std::numeric_limits<double>::infinity();
    }
    return concentrated_loglik(sums.sumsq, sums.sum_log_f, sums.n_obs);
}

double LoglikEvaluator::operator()(std::span<const double> x) const {
    const Prepared prep = prepare(x);
    if (!prep.valid) return -std::numeric_limits<double>::infinity();
    kernels::LaneModel lane{order_.state_dim(), prep.phi, prep.q, prep.p0, prep.mean};
    return finish(kernels::filter_scalar(view_, lane));
}

double LoglikEvaluator::sigma2_hat(std::span<const double> x) const {
    const Prepared prep = prepare(x);
    if (!prep.valid) return std::numeric_limits<double>::quiet_NaN();
    kernels::LaneModel lane{order_.state_dim(), prep.phi, prep.q, prep.p0, prep.mean};
    const auto sums = kernels::filter_scalar(view_, lane);
    return sums.sumsq / static_cast<double>(sums.n_obs);
}

void LoglikEvaluator::evaluate(std::span<const std::vector<double>> points,
                               std::span<double> out) const {
    const int r = order_.state_dim();
    std::vector<Prepared> prepared;
    prepared.reserve(kernels::kLanes);
    std::vector<std::size_t> slots;
    slots.reserve(kernels::kLanes);

    auto flush = [&]() {
        if (slots.empty()) return;
        std::vector<kernels::LaneModel> lanes;
        lanes.reserve(slots.size());
        for (const auto& prep : prepared) lanes.push_back({r, prep.phi, prep.q, prep.p0, prep.mean});
        kernels::FilterSums sums[kernels::kLanes];
        kernels::filter_batch(view_, lanes, std::span<kernels::FilterSums>(sums, lanes.size()));
        for (std::size_t l = 0; l < slots.size(); ++l) out[slots[l]] = finish(sums[l]);
        prepared.clear();
        slots.clear();
    };

    for (std::size_t i = 0; i < points.size(); ++i) {
        Prepared prep = prepare(points[i]);
        if (!prep.valid) {
            out[i] = -std::numeric_limits<double>::infinity();
            continue;
        }
        prepared.push_back(std::move(prep));
        slots.push_back(i);
        if (slots.size() == static_cast<std::size_t>(kernels::kLanes)) flush();
    }
    flush();
}

}  // namespace armamle
