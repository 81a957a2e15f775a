#pragma once

// Seeded generators and independent oracles shared by the test binaries.
// Nothing here calls into the code paths it is used to check.

#include <cmath>
#include <random>
#include <vector>

#include "gbdt/engine.hpp"
#include "gbdt/matrix_core.hpp"

namespace gbdt::testing {

using Rng = std::mt19937_64;

inline ComplexMatrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols,
                                   double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = Complex(normal(rng), normal(rng));
        }
    }
    return m;
}

inline ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n, double scale = 1.0) {
    const ComplexMatrix x = random_matrix(rng, n, n, scale);
    return 0.5 * (x + x.adjoint());
}

/// Random Hermitian scaled to spectral norm `norm`.
inline ComplexMatrix random_unit_hermitian(Rng& rng, Eigen::Index n, double norm = 1.0) {
    const ComplexMatrix h = random_hermitian(rng, n);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h, Eigen::EigenvaluesOnly);
    return h * (norm / eig.eigenvalues().cwiseAbs().maxCoeff());
}

inline ComplexMatrix random_psd(Rng& rng, Eigen::Index n, double scale = 1.0) {
    const ComplexMatrix x = random_matrix(rng, n, n, scale);
    return x * x.adjoint() / static_cast<double>(n);
}

/// Random unitary from the QR factor of a Gaussian matrix.
inline ComplexMatrix random_unitary(Rng& rng, Eigen::Index n) {
    Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(rng, n, n));
    return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

/// X + i·side·(‖X‖₂ + margin)·I: every eigenvalue has |Im λ| ≥ margin on
/// the chosen side of the real axis.
inline ComplexMatrix random_half_plane_matrix(Rng& rng, Eigen::Index n, double side,
                                              double margin = 1.0, double scale = 0.5) {
    const ComplexMatrix x = random_matrix(rng, n, n, scale);
    Eigen::JacobiSVD<ComplexMatrix> svd(x);
    const double norm2 = svd.singularValues()(0);
    return x + Complex(0.0, side * (norm2 + margin)) * ComplexMatrix::Identity(n, n);
}

/// Q·(D + N)·Q* with Q unitary, D diagonal with eigenvalues spread over
/// Re ∈ [−2, 2], side·Im ∈ [1, 2], and N small strictly upper triangular.
/// Spread spectra keep Sylvester solutions with low-rank data well conditioned.
inline ComplexMatrix random_spread_matrix(Rng& rng, Eigen::Index n, double side) {
    std::uniform_real_distribution<double> re(-2.0, 2.0);
    std::uniform_real_distribution<double> im(1.0, 2.0);
    ComplexMatrix t = random_matrix(rng, n, n, 0.2).triangularView<Eigen::StrictlyUpper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        t(i, i) = Complex(re(rng), side * im(rng));
    }
    const ComplexMatrix q = random_unitary(rng, n);
    return q * t * q.adjoint();
}

inline std::vector<double> random_shifts(Rng& rng, std::size_t r) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> c;
    while (c.size() < r) {
        const double v = u(rng);
        bool distinct = true;
        for (double x : c) {
            distinct = distinct && std::abs(x - v) > 0.1;
        }
        if (distinct) {
            c.push_back(v);
        }
    }
    return c;
}

/// Kronecker oracle for A·C − C·A* = Q, written in row-major vectorization
/// (vec(C)[i·n + j] = C_ij) with element loops, solved by full-pivot QR.
inline ComplexMatrix sylvester_oracle(const ComplexMatrix& a, const ComplexMatrix& q) {
    const Eigen::Index n = a.rows();
    ComplexMatrix big = ComplexMatrix::Zero(n * n, n * n);
    ComplexVector rhs(n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index row = i * n + j;
            rhs(row) = q(i, j);
            for (Eigen::Index l = 0; l < n; ++l) {
                big(row, l * n + j) += a(i, l);
                big(row, i * n + l) -= std::conj(a(j, l));
            }
        }
    }
    const ComplexVector x = big.fullPivHouseholderQr().solve(rhs);
    ComplexMatrix c(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            c(i, j) = x(i * n + j);
        }
    }
    return c;
}

/// Truncated Taylor series; accurate only for small ‖M‖.
inline ComplexMatrix taylor_expm(const ComplexMatrix& m) {
    const Eigen::Index n = m.rows();
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    ComplexMatrix sum = term;
    for (int k = 1; k < 60; ++k) {
        term = (term * m / static_cast<double>(k)).eval();
        sum += term;
        if (term.norm() < 1e-20 * sum.norm()) {
            break;
        }
    }
    return sum;
}

/// Scaling and squaring on top of the Taylor series (no Padé).
inline ComplexMatrix taylor_squaring_expm(const ComplexMatrix& m) {
    const double norm = m.norm();
    int s = norm > 0.1 ? static_cast<int>(std::ceil(std::log2(norm / 0.1))) : 0;
    ComplexMatrix e = taylor_expm(m / std::ldexp(1.0, s));
    for (int i = 0; i < s; ++i) {
        e = (e * e).eval();
    }
    return e;
}

/// A valid triple: spectrum of A on one side of the real axis and S(0) from
/// the Sylvester equation.
inline GbdtTriple random_triple(Rng& rng, Eigen::Index n, Eigen::Index m, std::size_t r,
                                double side) {
    GbdtTriple triple;
    triple.a = random_spread_matrix(rng, n, side);
    triple.pi0 = random_matrix(rng, n, m, 0.7);
    triple.shifts = random_shifts(rng, r);
    triple.s0 = hermitian_part(solve_sylvester(triple.a, kI * triple.pi0 * triple.pi0.adjoint()));
    return triple;
}

/// The scalar chain A = i, S(0) = 1/2, Π(0) = 1, c = 0, H ≡ 1.
namespace desk {

inline GbdtTriple triple() {
    GbdtTriple t;
    t.a = ComplexMatrix::Constant(1, 1, kI);
    t.s0 = ComplexMatrix::Constant(1, 1, 0.5);
    t.pi0 = ComplexMatrix::Constant(1, 1, 1.0);
    t.shifts = {0.0};
    return t;
}

inline HamiltonianFamily family() {
    return HamiltonianFamily::constant_hermitian({ComplexMatrix::Constant(1, 1, 1.0)});
}

inline double pi(double t) { return std::exp(-t); }
inline double s(double t) { return 0.5 * std::exp(-2.0 * t); }
inline double psi(double t, double zeta) { return 2.0 * std::exp(t + zeta); }
inline double quadratic(double t, double zeta) { return 4.0 * std::exp(2.0 * t + 2.0 * zeta); }
/// d/dt ∫₀¹ |ψ̃|² dζ.
inline double energy_rate(double t) { return 4.0 * std::exp(2.0 * t) * (std::exp(2.0) - 1.0); }

inline EvolvedState exact_state(double t) {
    return make_state(t, ComplexMatrix::Constant(1, 1, pi(t)),
                      ComplexMatrix::Constant(1, 1, s(t)), triple().a);
}

} // namespace desk

} // namespace gbdt::testing
