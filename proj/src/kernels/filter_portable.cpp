#include <array>

#include "filter_batch_impl.hpp"

namespace armamle::kernels {
namespace {

// Plain 4-wide pack; the compiler may or may not vectorize it.
struct PortablePack {
    std::array<double, kLanes> v;
    using Mask = int;

    static PortablePack set1(double x) { return {{x, x, x, x}}; }
    static PortablePack load(const double* p) { return {{p[0], p[1], p[2], p[3]}}; }
    static void store(double* p, const PortablePack& a) {
        for (int l = 0; l < kLanes; ++l) p[l] = a.v[l];
    }

    template <class Op>
    static PortablePack map(const PortablePack& a, const PortablePack& b, Op op) {
        PortablePack out;
        for (int l = 0; l < kLanes; ++l) out.v[l] = op(a.v[l], b.v[l]);
        return out;
    }
    static PortablePack add(const PortablePack& a, const PortablePack& b) {
        return map(a, b, [](double x, double y) { return x + y; });
    }
    static PortablePack sub(const PortablePack& a, const PortablePack& b) {
        return map(a, b, [](double x, double y) { return x - y; });
    }
    static PortablePack mul(const PortablePack& a, const PortablePack& b) {
        return map(a, b, [](double x, double y) { return x * y; });
    }
    static PortablePack div(const PortablePack& a, const PortablePack& b) {
        return map(a, b, [](double x, double y) { return x / y; });
    }
    static PortablePack max(const PortablePack& a, const PortablePack& b) {
        return map(a, b, [](double x, double y) { return std::max(x, y); });
    }
    static PortablePack abs(const PortablePack& a) {
        PortablePack out;
        for (int l = 0; l < kLanes; ++l) out.v[l] = std::abs(a.v[l]);
        return out;
    }

    template <class Cmp>
    static Mask compare(const PortablePack& a, const PortablePack& b, Cmp cmp) {
        int bits = 0;
        for (int l = 0; l < kLanes; ++l) bits |= cmp(a.v[l], b.v[l]) ? (1 << l) : 0;
        return bits;
    }
    static Mask gt(const PortablePack& a, const PortablePack& b) {
        return compare(a, b, [](double x, double y) { return x > y; });
    }
    static Mask le(const PortablePack& a, const PortablePack& b) {
        return compare(a, b, [](double x, double y) { return x <= y; });
    }
    static Mask eq(const PortablePack& a, const PortablePack& b) {
        return compare(a, b, [](double x, double y) { return x == y; });
    }
    static Mask mask_and(Mask a, Mask b) { return a & b; }
    static int bits(Mask m) { return m; }
    static Mask from_bits(int b) { return b; }
    /// Lanes set in `m` take `if_true`, others `if_false`.
    static PortablePack blend(Mask m, const PortablePack& if_false, const PortablePack& if_true) {
        PortablePack out;
        for (int l = 0; l < kLanes; ++l) out.v[l] = (m >> l) & 1 ? if_true.v[l] : if_false.v[l];
        return out;
    }
};

}  // namespace

void filter_batch_portable(const SeriesView& series, std::span<const LaneModel> lanes,
                           std::span<FilterSums> out) {
    filter_batch_impl<PortablePack>(series, lanes, out);
}

}  // namespace armamle::kernels
