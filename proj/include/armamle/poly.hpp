#pragma once

#include <complex>
#include <span>
#include <vector>

#include "armamle/core.hpp"

namespace armamle::poly {

using Complex = std::complex<double>;

/// Sign convention of a lag polynomial.
///   AR: Phi(x)   = 1 - phi_1 x - ... - phi_p x^p
///   MA: Theta(x) = 1 + theta_1 x + ... + theta_q x^q
enum class Kind { AR, MA };

class ConjugacyError : public Error {
public:
    using Error::Error;
};

/// Inverted roots (lambda, nu) of the AR and MA polynomials. The model is
/// causal/invertible iff every member lies inside the unit circle.
struct RootSet {
    std::vector<Complex> ar_inv_roots;
    std::vector<Complex> ma_inv_roots;
};

inline constexpr double kConjugateTol = 1e-10;

/// Reciprocals of the roots of Phi (or Theta), as eigenvalues of the companion
/// matrix of x^k P(1/x). A zero leading coefficient yields an inverted root at 0.
std::vector<Complex> coeffs_to_inv_roots(std::span<const double> coeffs, Kind kind);

/// Expands prod_i (1 - z_i x) and returns phi (AR) or theta (MA). Conjugate
/// partners are matched and averaged first; the imaginary residue of the
/// expansion is dropped. Throws ConjugacyError if a non-real member has no
/// partner within kConjugateTol.
std::vector<double> inv_roots_to_coeffs(std::span<const Complex> inv_roots, Kind kind);

/// Smallest |lambda_i - nu_j| over AR x MA pairs; +inf if either side is empty.
double min_cross_distance(const RootSet& roots);

RootSet inv_roots(const ArmaParams& params);

/// Largest inverted-root modulus; 0 for an empty coefficient vector.
double max_inv_root_modulus(std::span<const double> coeffs, Kind kind);

/// Schur-Cohn (step-down) test: true iff every root of the lag polynomial has
/// modulus strictly greater than `radius`.
bool roots_outside(std::span<const double> coeffs, Kind kind, double radius = 1.0);

}  // namespace armamle::poly
