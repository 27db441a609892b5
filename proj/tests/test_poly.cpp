#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "armamle/poly.hpp"
#include "oracle.hpp"

using namespace armamle;
using poly::Complex;
using poly::Kind;

namespace {

// Sorts for comparison: by real part, then imaginary part.
std::vector<Complex> sorted(std::vector<Complex> v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return v;
}

}  // namespace

TEST(Poly, Ar1InvertedRootIsPhi) {
    const std::vector<double> phi{0.7};
    const auto r = poly::coeffs_to_inv_roots(phi, Kind::AR);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NEAR(r[0].real(), 0.7, 1e-14);
    const std::vector<double> theta{0.4};
    EXPECT_NEAR(poly::coeffs_to_inv_roots(theta, Kind::MA)[0].real(), -0.4, 1e-14);
}

TEST(Poly, ComplexPairFromAr2) {
    // 1 - 2 m cos(t) z + m^2 z^2 has inverted roots m e^{+-it}.
    const double m = 0.8, t = 1.1;
    const std::vector<double> phi{2 * m * std::cos(t), -m * m};
    const auto r = sorted(poly::coeffs_to_inv_roots(phi, Kind::AR));
    ASSERT_EQ(r.size(), 2u);
    EXPECT_NEAR(std::abs(r[0]), m, 1e-12);
    EXPECT_NEAR(std::abs(std::arg(r[1])), t, 1e-12);
    EXPECT_NEAR(r[0].imag(), -r[1].imag(), 1e-12);
}

TEST(Poly, RoundTripRandomRoots) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mod(0.05, 0.95), ang(0.0, 3.14159);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Complex> roots;
        const int pairs = 1 + trial % 3;
        for (int k = 0; k < pairs; ++k) {
            const Complex z = std::polar(mod(rng), ang(rng));
            roots.push_back(z);
            roots.push_back(std::conj(z));
        }
        if (trial % 2) roots.emplace_back(mod(rng) * (trial % 4 == 1 ? 1 : -1), 0.0);
        for (Kind kind : {Kind::AR, Kind::MA}) {
            const auto c = poly::inv_roots_to_coeffs(roots, kind);
            const auto back = sorted(poly::coeffs_to_inv_roots(c, kind));
            const auto want = sorted(roots);
            ASSERT_EQ(back.size(), want.size());
            // Match each root to its nearest counterpart.
            for (const auto& z : want) {
                double best = 1e9;
                for (const auto& b : back) best = std::min(best, std::abs(b - z));
                EXPECT_LT(best, 1e-8);
            }
        }
    }
}

TEST(Poly, RealRootExpansionMatchesOracle) {
    const std::vector<double> r{0.5, -0.3, 0.9};
    std::vector<Complex> z;
    for (double v : r) z.emplace_back(v, 0.0);
    const auto phi = poly::inv_roots_to_coeffs(z, Kind::AR);
    const auto want = oracle::ar_from_real_roots(r);
    ASSERT_EQ(phi.size(), want.size());
    for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_NEAR(phi[i], want[i], 1e-14);
    // MA sign convention: Theta(z) = prod(1 - z r) gives theta = -phi.
    const auto theta = poly::inv_roots_to_coeffs(z, Kind::MA);
    for (std::size_t i = 0; i < theta.size(); ++i) EXPECT_NEAR(theta[i], -want[i], 1e-14);
}

TEST(Poly, NonConjugateSetIsRejected) {
    const std::vector<Complex> z{{0.3, 0.4}};
    EXPECT_THROW(poly::inv_roots_to_coeffs(z, Kind::AR), poly::ConjugacyError);
}

TEST(Poly, StepDownAgreesWithCompanionEigenvalues) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.6, 1.6);
    int disagreements = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const int k = 1 + trial % 4;
        std::vector<double> c(k);
        for (double& v : c) v = u(rng) / k;
        for (Kind kind : {Kind::AR, Kind::MA}) {
            const double m = poly::max_inv_root_modulus(c, kind);
            if (std::abs(m - 1.0) < 1e-6) continue;  // too close to call
            if ((m < 1.0) != poly::roots_outside(c, kind)) ++disagreements;
        }
    }
    EXPECT_EQ(disagreements, 0);
}

TEST(Poly, CrossDistance) {
    poly::RootSet rs;
    EXPECT_TRUE(std::isinf(poly::min_cross_distance(rs)));
    rs.ar_inv_roots = {{0.5, 0.0}};
    rs.ma_inv_roots = {{0.2, 0.4}, {0.2, -0.4}};
    EXPECT_NEAR(poly::min_cross_distance(rs), 0.5, 1e-15);
    // (1 - z/2)(1 - z/3) against (1 - z/2)(1 + 2z/3): a shared factor.
    const ArmaParams red{{5.0 / 6, -1.0 / 6}, {1.0 / 6, -1.0 / 3}, 1.0, 0.0};
    EXPECT_LT(poly::min_cross_distance(poly::inv_roots(red)), 1e-8);
}
