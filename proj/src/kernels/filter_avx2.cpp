// AVX2 instantiation of the batched filter. Only the code between the target
// pragmas is compiled for AVX2; callers must check avx2_supported() first.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>

#include "armamle/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define ARMAMLE_HAVE_X86 1
#include <immintrin.h>
#else
#define ARMAMLE_HAVE_X86 0
#endif

#if ARMAMLE_HAVE_X86

#pragma GCC push_options
#pragma GCC target("avx2")

#include "filter_batch_impl.hpp"

namespace armamle::kernels {
namespace {

struct Avx2Pack {
    __m256d v;
    using Mask = __m256d;

    static Avx2Pack set1(double x) { return {_mm256_set1_pd(x)}; }
    static Avx2Pack load(const double* p) { return {_mm256_loadu_pd(p)}; }
    static void store(double* p, const Avx2Pack& a) { _mm256_storeu_pd(p, a.v); }

    static Avx2Pack add(const Avx2Pack& a, const Avx2Pack& b) { return {_mm256_add_pd(a.v, b.v)}; }
    static Avx2Pack sub(const Avx2Pack& a, const Avx2Pack& b) { return {_mm256_sub_pd(a.v, b.v)}; }
    static Avx2Pack mul(const Avx2Pack& a, const Avx2Pack& b) { return {_mm256_mul_pd(a.v, b.v)}; }
    static Avx2Pack div(const Avx2Pack& a, const Avx2Pack& b) { return {_mm256_div_pd(a.v, b.v)}; }
    // std::max(x, y) returns x unless x < y; _mm256_max_pd(y, x) matches that.
    static Avx2Pack max(const Avx2Pack& a, const Avx2Pack& b) { return {_mm256_max_pd(b.v, a.v)}; }
    static Avx2Pack abs(const Avx2Pack& a) {
        return {_mm256_andnot_pd(_mm256_set1_pd(-0.0), a.v)};
    }

    static Mask gt(const Avx2Pack& a, const Avx2Pack& b) { return _mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ); }
    static Mask le(const Avx2Pack& a, const Avx2Pack& b) { return _mm256_cmp_pd(a.v, b.v, _CMP_LE_OQ); }
    static Mask eq(const Avx2Pack& a, const Avx2Pack& b) { return _mm256_cmp_pd(a.v, b.v, _CMP_EQ_OQ); }
    static Mask mask_and(Mask a, Mask b) { return _mm256_and_pd(a, b); }
    static int bits(Mask m) { return _mm256_movemask_pd(m); }
    static Mask from_bits(int b) {
        const __m256i lane_bit = _mm256_set_epi64x(8, 4, 2, 1);
        const __m256i sel = _mm256_and_si256(_mm256_set1_epi64x(b), lane_bit);
        return _mm256_castsi256_pd(_mm256_cmpeq_epi64(sel, lane_bit));
    }
    static Avx2Pack blend(Mask m, const Avx2Pack& if_false, const Avx2Pack& if_true) {
        return {_mm256_blendv_pd(if_false.v, if_true.v, m)};
    }
};

}  // namespace

void filter_batch_avx2(const SeriesView& series, std::span<const LaneModel> lanes,
                       std::span<FilterSums> out) {
    filter_batch_impl<Avx2Pack>(series, lanes, out);
}

}  // namespace armamle::kernels

#pragma GCC pop_options

#else

#include "armamle/core.hpp"

namespace armamle::kernels {

void filter_batch_avx2(const SeriesView&, std::span<const LaneModel>, std::span<FilterSums>) {
    throw Error("AVX2 kernel is not available on this architecture");
}

}  // namespace armamle::kernels

#endif
