#pragma once

// Lane-batched Kalman filter, templated on a 4-wide double pack.
//
// Mirrors filter_scalar() operation for operation. Each lane freezes its
// covariance independently (a blend keeps frozen lanes constant), so every lane
// reproduces the scalar result exactly. Included by exactly one translation
// unit per pack type; everything here has internal linkage.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "armamle/kernels.hpp"

namespace armamle::kernels {
namespace {

template <class Pack>
void filter_batch_impl(const SeriesView& series, std::span<const LaneModel> lanes,
                       std::span<FilterSums> out) {
    using Mask = typename Pack::Mask;
    constexpr int L = kLanes;
    const int used = static_cast<int>(lanes.size());
    const int r = lanes[0].r;
    const std::size_t n = series.y.size();
    const int all_bits = (1 << L) - 1;

    // Unused lanes replicate lane 0 and are discarded.
    auto lane_of = [&](int l) -> const LaneModel& { return lanes[l < used ? l : 0]; };

    alignas(64) double buf[L];
    auto gather = [&](auto&& get) {
        for (int l = 0; l < L; ++l) buf[l] = get(lane_of(l));
        return Pack::load(buf);
    };

    Pack phi[kMaxState], q[kMaxState];
    Pack a[kMaxState], P[kMaxState * kMaxState], Pu[kMaxState * kMaxState],
        M[kMaxState * kMaxState];
    for (int i = 0; i < r; ++i) {
        phi[i] = gather([i](const LaneModel& m) { return m.phi[i]; });
        q[i] = gather([i](const LaneModel& m) { return m.q[i]; });
        a[i] = Pack::set1(0.0);
    }
    for (int k = 0; k < r * r; ++k) P[k] = gather([k](const LaneModel& m) { return m.p0[k]; });
    const Pack mean = gather([](const LaneModel& m) { return m.mean; });

    const Pack zero = Pack::set1(0.0);
    const Pack one = Pack::set1(1.0);
    const Pack tol = Pack::set1(kSteadyStateTol);

    Pack sumsq = zero;
    Pack sum_log = zero;
    int n_obs = 0;
    int bad_bits = 0;
    int frozen_bits = 0;
    alignas(64) double log_f_frozen[L] = {};

    for (std::size_t t = 0; t < n; ++t) {
        const bool obs = series.observed[t] != 0;
        const bool all_frozen = frozen_bits == all_bits;
        if (obs) {
            const Pack y = Pack::set1(series.y[t]);
            const Pack v = Pack::sub(Pack::sub(y, mean), a[0]);
            const Pack F = P[0];
            const Mask ok = Pack::mask_and(Pack::gt(F, zero), Pack::eq(Pack::sub(F, F), zero));
            bad_bits |= ~Pack::bits(ok) & all_bits;

            sumsq = Pack::add(sumsq, Pack::div(Pack::mul(v, v), F));
            if (all_frozen) {
                sum_log = Pack::add(sum_log, Pack::load(log_f_frozen));
            } else {
                Pack::store(buf, F);
                for (int l = 0; l < L; ++l) buf[l] = std::log(buf[l]);
                sum_log = Pack::add(sum_log, Pack::load(buf));
            }
            ++n_obs;

            const Pack g = Pack::div(v, F);
            for (int i = 0; i < r; ++i) a[i] = Pack::add(a[i], Pack::mul(P[i * r], g));
            if (!all_frozen) {
                for (int i = 0; i < r; ++i) {
                    for (int j = 0; j < r; ++j) {
                        Pu[i * r + j] =
                            Pack::sub(P[i * r + j], Pack::mul(P[i * r], Pack::div(P[j], F)));
                    }
                }
            }
        } else {
            frozen_bits = 0;
            std::copy(P, P + r * r, Pu);
        }

        const Pack a0 = a[0];
        for (int i = 0; i + 1 < r; ++i) a[i] = Pack::add(Pack::mul(phi[i], a0), a[i + 1]);
        a[r - 1] = Pack::mul(phi[r - 1], a0);

        if (frozen_bits == all_bits) continue;

        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < r; ++j) {
                M[i * r + j] = (i + 1 < r)
                                   ? Pack::add(Pack::mul(phi[i], Pu[j]), Pu[(i + 1) * r + j])
                                   : Pack::mul(phi[i], Pu[j]);
            }
        }
        const Mask keep = Pack::from_bits(frozen_bits);
        Pack diff = zero;
        Pack scale = one;
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < r; ++j) {
                const Pack tp = (j + 1 < r)
                                    ? Pack::add(Pack::mul(M[i * r], phi[j]), M[i * r + j + 1])
                                    : Pack::mul(M[i * r], phi[j]);
                const Pack pn = Pack::add(tp, Pack::mul(q[i], q[j]));
                diff = Pack::max(diff, Pack::abs(Pack::sub(pn, P[i * r + j])));
                scale = Pack::max(scale, Pack::abs(pn));
                P[i * r + j] = Pack::blend(keep, pn, P[i * r + j]);
            }
        }
        if (obs) {
            const int converged = Pack::bits(Pack::le(diff, Pack::mul(tol, scale)));
            const int newly = converged & ~frozen_bits & all_bits;
            if (newly) {
                Pack::store(buf, P[0]);
                for (int l = 0; l < L; ++l) {
                    if (newly & (1 << l)) log_f_frozen[l] = std::log(buf[l]);
                }
                frozen_bits |= newly;
            }
        }
    }

    alignas(64) double ss[L], sl[L];
    Pack::store(ss, sumsq);
    Pack::store(sl, sum_log);
    for (int l = 0; l < used; ++l) {
        out[l].sumsq = ss[l];
        out[l].sum_log_f = sl[l];
        out[l].n_obs = n_obs;
        out[l].degenerate = (bad_bits >> l) & 1;
    }
}

}  // namespace
}  // namespace armamle::kernels
