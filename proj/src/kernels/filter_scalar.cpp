#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "armamle/kernels.hpp"

namespace armamle::kernels {

FilterSums filter_scalar(const SeriesView& series, const LaneModel& model, FilterTrace* trace) {
    const int r = model.r;
    const std::size_t n = series.y.size();

    std::array<double, kMaxState> a{};
    std::array<double, kMaxState * kMaxState> P{};
    std::array<double, kMaxState * kMaxState> Pu{};
    std::array<double, kMaxState * kMaxState> M{};
    std::copy(model.p0.begin(), model.p0.begin() + r * r, P.begin());

    const double* phi = model.phi.data();
    const double* q = model.q.data();

    if (trace) {
        trace->innovations.assign(n, std::numeric_limits<double>::quiet_NaN());
        trace->variances.assign(n, std::numeric_limits<double>::quiet_NaN());
    }

    FilterSums sums;
    bool frozen = false;
    double log_f_frozen = 0.0;

    for (std::size_t t = 0; t < n; ++t) {
        const bool obs = series.observed[t] != 0;
        if (obs) {
            const double v = (series.y[t] - model.mean) - a[0];
            const double F = P[0];
            if (!(F > 0.0) || !std::isfinite(F)) {
                sums.degenerate = true;
                return sums;
            }
            if (trace) {
                trace->innovations[t] = v;
                trace->variances[t] = F;
            }
            sums.sumsq += v * v / F;
            sums.sum_log_f += frozen ? log_f_frozen : std::log(F);
            ++sums.n_obs;

            const double g = v / F;
            for (int i = 0; i < r; ++i) a[i] = a[i] + P[i * r] * g;
            if (!frozen) {
                for (int i = 0; i < r; ++i) {
                    for (int j = 0; j < r; ++j) {
                        Pu[i * r + j] = P[i * r + j] - P[i * r] * (P[j] / F);
                    }
                }
            }
        } else {
            frozen = false;
            std::copy(P.begin(), P.begin() + r * r, Pu.begin());
        }

        // a <- T a
        const double a0 = a[0];
        for (int i = 0; i + 1 < r; ++i) a[i] = phi[i] * a0 + a[i + 1];
        a[r - 1] = phi[r - 1] * a0;

        if (frozen) continue;

        // P <- T Pu T' + q q'
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < r; ++j) {
                M[i * r + j] = (i + 1 < r) ? phi[i] * Pu[j] + Pu[(i + 1) * r + j]
                                           : phi[i] * Pu[j];
            }
        }
        double diff = 0.0;
        double scale = 1.0;
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < r; ++j) {
                const double tp = (j + 1 < r) ? M[i * r] * phi[j] + M[i * r + j + 1]
                                              : M[i * r] * phi[j];
                const double pn = tp + q[i] * q[j];
                diff = std::max(diff, std::abs(pn - P[i * r + j]));
                scale = std::max(scale, std::abs(pn));
                P[i * r + j] = pn;
            }
        }
        if (obs && diff <= kSteadyStateTol * scale) {
            frozen = true;
            log_f_frozen = std::log(P[0]);
        }
    }
    return sums;
}

}  // namespace armamle::kernels
