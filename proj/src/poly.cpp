#include "armamle/poly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace armamle::poly {

namespace {

// Coefficients a_1..a_k of the lag polynomial 1 + a_1 x + ... + a_k x^k.
std::vector<double> lag_coeffs(std::span<const double> coeffs, Kind kind) {
    std::vector<double> a(coeffs.begin(), coeffs.end());
    if (kind == Kind::AR) {
        for (double& v : a) v = -v;
    }
    return a;
}

}  // namespace

std::vector<Complex> coeffs_to_inv_roots(std::span<const double> coeffs, Kind kind) {
    const auto a = lag_coeffs(coeffs, kind);
    const auto k = static_cast<Eigen::Index>(a.size());
    if (k == 0) return {};
    if (k == 1) return {Complex(-a[0], 0.0)};

    // Inverted roots are the roots of z^k + a_1 z^{k-1} + ... + a_k.
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index j = 0; j < k; ++j) companion(0, j) = -a[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < k; ++i) companion(i, i - 1) = 1.0;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw Error("companion eigenvalue solver did not converge");
    }
    std::vector<Complex> out;
    out.reserve(a.size());
    for (Eigen::Index i = 0; i < k; ++i) out.push_back(solver.eigenvalues()(i));
    return out;
}

std::vector<double> inv_roots_to_coeffs(std::span<const Complex> inv_roots, Kind kind) {
    const std::size_t k = inv_roots.size();
    std::vector<Complex> roots(inv_roots.begin(), inv_roots.end());

    // Pair conjugates and symmetrize so the expansion is real.
    std::vector<bool> used(k, false);
    for (std::size_t i = 0; i < k; ++i) {
        if (used[i]) continue;
        if (std::abs(roots[i].imag()) <= kConjugateTol) {
            roots[i] = Complex(roots[i].real(), 0.0);
            used[i] = true;
            continue;
        }
        std::size_t best = k;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = i + 1; j < k; ++j) {
            if (used[j]) continue;
            const double d = std::abs(roots[j] - std::conj(roots[i]));
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best == k || best_dist > kConjugateTol) {
            throw ConjugacyError("inverted roots are not closed under conjugation");
        }
        const Complex avg = 0.5 * (roots[i] + std::conj(roots[best]));
        roots[i] = avg;
        roots[best] = std::conj(avg);
        used[i] = used[best] = true;
    }

    // prod (1 - z_i x)
    std::vector<Complex> c(k + 1, Complex(0.0, 0.0));
    c[0] = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t d = i + 1; d >= 1; --d) c[d] -= roots[i] * c[d - 1];
    }

    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double re = c[i + 1].real();
        out[i] = kind == Kind::AR ? -re : re;
    }
    return out;
}

double min_cross_distance(const RootSet& roots) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : roots.ar_inv_roots) {
        for (const auto& m : roots.ma_inv_roots) best = std::min(best, std::abs(a - m));
    }
    return best;
}

RootSet inv_roots(const ArmaParams& params) {
    return {coeffs_to_inv_roots(params.phi, Kind::AR),
            coeffs_to_inv_roots(params.theta, Kind::MA)};
}

double max_inv_root_modulus(std::span<const double> coeffs, Kind kind) {
    double best = 0.0;
    for (const auto& z : coeffs_to_inv_roots(coeffs, kind)) best = std::max(best, std::abs(z));
    return best;
}

bool roots_outside(std::span<const double> coeffs, Kind kind, double radius) {
    // Roots of P(radius * x) are the roots of P divided by radius.
    auto a = lag_coeffs(coeffs, kind);
    double scale = 1.0;
    for (double& v : a) {
        scale *= radius;
        v *= scale;
        if (!std::isfinite(v)) return false;
    }
    // Step-down recursion on the reflection coefficients of z^k P(1/z).
    for (std::size_t m = a.size(); m >= 1; --m) {
        const double kappa = a[m - 1];
        if (!(std::abs(kappa) < 1.0)) return false;
        const double denom = 1.0 - kappa * kappa;
        std::vector<double> next(m - 1);
        for (std::size_t i = 1; i < m; ++i) {
            next[i - 1] = (a[i - 1] - kappa * a[m - i - 1]) / denom;
        }
        a = std::move(next);
    }
    return true;
}

}  // namespace armamle::poly
