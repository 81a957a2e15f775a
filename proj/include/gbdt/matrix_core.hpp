#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "gbdt/error.hpp"

namespace gbdt {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Absolute distance below which two spectra (or a shift and a spectrum)
/// are treated as intersecting.
inline constexpr double kDefaultSpectralGap = 1e-8;

/// Asymmetry ‖M − M*‖_F accepted for an input that should be Hermitian.
inline constexpr double kDefaultHermitianTolerance = 1e-10;

/// A matrix accepted as Hermitian. `matrix` holds the Hermitian part
/// (M + M*)/2 of the input; `asymmetry` is ‖M − M*‖_F of the original.
struct HermitianCertificate {
    ComplexMatrix matrix;
    double asymmetry = 0.0;
};

void require_square(const ComplexMatrix& m, const char* what);
void require_finite(const ComplexMatrix& m, const char* what);

double asymmetry(const ComplexMatrix& m);
ComplexMatrix hermitian_part(const ComplexMatrix& m);

/// Throws Error{NotHermitian} when the asymmetry exceeds `tolerance`.
HermitianCertificate certify_hermitian(const ComplexMatrix& m,
                                       double tolerance = kDefaultHermitianTolerance);

/// Matrix exponential by scaling and squaring with the degree-13 Padé
/// approximant (Higham 2005). Backward error is at unit roundoff level
/// for any norm; the number of squarings grows like log2(‖M‖₁).
ComplexMatrix expm(const ComplexMatrix& m);

/// Eigenvalues sorted lexicographically by (real, imaginary) part.
std::vector<Complex> spectrum(const ComplexMatrix& m);

/// Eigenvalues of a Hermitian matrix in ascending order.
Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m);

/// min_{λ∈σ(A)} |λ − z|.
double distance_to_spectrum(const ComplexMatrix& a, Complex z);

/// min |λ − μ̄| over λ, μ ∈ σ(A), i.e. the separation of σ(A) from σ(A*).
double spectral_separation_from_adjoint(const ComplexMatrix& a);

/// (A − cI)^{-1}. Throws Error{SpectralGap} if c lies within `gap` of σ(A).
ComplexMatrix resolvent(const ComplexMatrix& a, Complex c,
                        double gap = kDefaultSpectralGap);

/// The unique C with A·C − C·A* = Q.
///
/// Solved densely through the vectorized system
/// (I ⊗ A − conj(A) ⊗ I) vec(C) = vec(Q). The system is n²×n², so the cost
/// is O(n⁶); intended for n up to about 20.
///
/// Throws Error{SpectralGap} when σ(A) and σ(A*) come within `gap` of each
/// other (the solution is then not unique) and Error{Shape} on mismatched
/// dimensions.
ComplexMatrix solve_sylvester(const ComplexMatrix& a, const ComplexMatrix& q,
                              double gap = kDefaultSpectralGap);

/// 2-norm condition number of a Hermitian matrix; +inf when singular.
double hermitian_condition(const ComplexMatrix& s);

} // namespace gbdt
