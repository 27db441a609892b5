#pragma once

// Kalman filter kernels for the ARMA state-space form.
//
// The scalar kernel is the reference. The batch kernels run up to kLanes
// parameter vectors against the same series at once (one vector per SIMD
// lane) and are required to reproduce the scalar kernel lane by lane; the
// instruction sequence is kept identical so results agree bit for bit.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace armamle::kernels {

inline constexpr int kLanes = 4;
inline constexpr int kMaxState = 16;
/// P_t is frozen once max|P_{t+1} - P_t| <= kSteadyStateTol * max(1, max|P|).
inline constexpr double kSteadyStateTol = 1e-13;

struct SeriesView {
    std::span<const double> y;
    std::span<const std::uint8_t> observed;
};

/// One parameter vector in state-space form with unit disturbance variance.
struct LaneModel {
    int r = 1;
    std::span<const double> phi;  // length r (first column of T)
    std::span<const double> q;    // length r, q[0] = 1
    std::span<const double> p0;   // r*r row-major stationary covariance
    double mean = 0.0;
};

struct FilterSums {
    double sumsq = 0.0;      // sum v_t^2 / F_t
    double sum_log_f = 0.0;  // sum log F_t
    int n_obs = 0;
    bool degenerate = false;  // some F_t <= 0 or non-finite
};

/// Per-step innovations v_t and unit-scale variances F_t (NaN where missing).
struct FilterTrace {
    std::vector<double> innovations;
    std::vector<double> variances;
};

FilterSums filter_scalar(const SeriesView& series, const LaneModel& model,
                         FilterTrace* trace = nullptr);

enum class Isa { Portable, Avx2 };

const char* isa_name(Isa isa);
bool avx2_supported();

/// Lane-batched variants; all lanes must share r. lanes.size() <= kLanes.
void filter_batch_portable(const SeriesView& series, std::span<const LaneModel> lanes,
                           std::span<FilterSums> out);
void filter_batch_avx2(const SeriesView& series, std::span<const LaneModel> lanes,
                       std::span<FilterSums> out);

/// Best available batch kernel, unless overridden with force_isa().
Isa active_isa();
void force_isa(std::optional<Isa> isa);
void filter_batch(const SeriesView& series, std::span<const LaneModel> lanes,
                  std::span<FilterSums> out);

}  // namespace armamle::kernels
