#include "gbdt/matrix_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace gbdt {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Shape: return "shape";
    case ErrorKind::NonFinite: return "non-finite";
    case ErrorKind::SpectralGap: return "spectral-gap";
    case ErrorKind::NotHermitian: return "not-hermitian";
    case ErrorKind::IdentityResidual: return "identity-residual";
    case ErrorKind::DuplicateShift: return "duplicate-shift";
    case ErrorKind::NotOrthonormal: return "not-orthonormal";
    case ErrorKind::SingularS: return "singular-S";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::GridTooLarge: return "grid-too-large";
    case ErrorKind::Parse: return "parse";
    }
    return "unknown";
}

void require_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << what << " must be square, got " << m.rows() << "x" << m.cols();
        throw Error(ErrorKind::Shape, os.str());
    }
}

void require_finite(const ComplexMatrix& m, const char* what) {
    if (!m.allFinite()) {
        throw Error(ErrorKind::NonFinite, std::string(what) + " has non-finite entries");
    }
}

double asymmetry(const ComplexMatrix& m) {
    return (m - m.adjoint()).norm();
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
    return 0.5 * (m + m.adjoint());
}

HermitianCertificate certify_hermitian(const ComplexMatrix& m, double tolerance) {
    require_square(m, "Hermitian input");
    require_finite(m, "Hermitian input");
    const double asym = asymmetry(m);
    if (asym > tolerance) {
        std::ostringstream os;
        os << "matrix is not Hermitian: ||M - M*||_F = " << asym << " > " << tolerance;
        throw Error(ErrorKind::NotHermitian, os.str());
    }
    return {hermitian_part(m), asym};
}

namespace {

// Padé [13/13] coefficients and the θ₁₃ scaling threshold.
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};
constexpr double kTheta13 = 5.371920351148152;

} // namespace

ComplexMatrix expm(const ComplexMatrix& m) {
    require_square(m, "expm argument");
    require_finite(m, "expm argument");
    const Eigen::Index n = m.rows();
    if (n == 0) {
        return m;
    }
    if (m.isZero(0.0)) {
        return ComplexMatrix::Identity(n, n);
    }

    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > kTheta13) {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
    }
    const ComplexMatrix a = m / std::ldexp(1.0, squarings);

    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix a2 = a * a;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a4 * a2;
    const auto& b = kPade13;

    const ComplexMatrix u_inner = b[13] * a6 + b[11] * a4 + b[9] * a2;
    const ComplexMatrix u =
        a * (a6 * u_inner + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    const ComplexMatrix v_inner = b[12] * a6 + b[10] * a4 + b[8] * a2;
    const ComplexMatrix v = a6 * v_inner + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

    ComplexMatrix result = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) {
        result = (result * result).eval();
    }
    return result;
}

std::vector<Complex> spectrum(const ComplexMatrix& m) {
    require_square(m, "spectrum argument");
    require_finite(m, "spectrum argument");
    std::vector<Complex> values;
    if (m.rows() == 0) {
        return values;
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::InvalidArgument, "eigenvalue iteration did not converge");
    }
    const auto& ev = solver.eigenvalues();
    values.assign(ev.data(), ev.data() + ev.size());
    std::sort(values.begin(), values.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) {
            return x.real() < y.real();
        }
        return x.imag() < y.imag();
    });
    return values;
}

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& m) {
    require_square(m, "Hermitian eigenvalue argument");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(m),
                                                        Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

double distance_to_spectrum(const ComplexMatrix& a, Complex z) {
    double best = std::numeric_limits<double>::infinity();
    for (Complex lambda : spectrum(a)) {
        best = std::min(best, std::abs(lambda - z));
    }
    return best;
}

double spectral_separation_from_adjoint(const ComplexMatrix& a) {
    const auto values = spectrum(a);
    double best = std::numeric_limits<double>::infinity();
    for (Complex lambda : values) {
        for (Complex mu : values) {
            best = std::min(best, std::abs(lambda - std::conj(mu)));
        }
    }
    return best;
}

ComplexMatrix resolvent(const ComplexMatrix& a, Complex c, double gap) {
    require_square(a, "A");
    const double dist = distance_to_spectrum(a, c);
    if (dist <= gap) {
        std::ostringstream os;
        os << "shift " << c << " lies within " << gap << " of the spectrum of A (distance "
           << dist << ")";
        throw Error(ErrorKind::SpectralGap, os.str());
    }
    const Eigen::Index n = a.rows();
    const ComplexMatrix shifted = a - c * ComplexMatrix::Identity(n, n);
    return shifted.partialPivLu().inverse();
}

ComplexMatrix solve_sylvester(const ComplexMatrix& a, const ComplexMatrix& q, double gap) {
    require_square(a, "A");
    require_finite(a, "A");
    require_finite(q, "Q");
    const Eigen::Index n = a.rows();
    if (q.rows() != n || q.cols() != n) {
        std::ostringstream os;
        os << "Sylvester right-hand side must be " << n << "x" << n << ", got " << q.rows()
           << "x" << q.cols();
        throw Error(ErrorKind::Shape, os.str());
    }
    const double separation = spectral_separation_from_adjoint(a);
    if (separation <= gap) {
        std::ostringstream os;
        os << "spectra of A and A* intersect (separation " << separation
           << "); AC - CA* = Q has no unique solution";
        throw Error(ErrorKind::SpectralGap, os.str());
    }
    if (n == 0) {
        return q;
    }

    // Column-major vec: vec(AC) = (I ⊗ A) vec(C), vec(CA*) = (conj(A) ⊗ I) vec(C).
    const Eigen::Index nn = n * n;
    ComplexMatrix kron = ComplexMatrix::Zero(nn, nn);
    for (Eigen::Index j = 0; j < n; ++j) {
        kron.block(j * n, j * n, n, n) += a;
        for (Eigen::Index l = 0; l < n; ++l) {
            const Complex coeff = std::conj(a(j, l));
            if (coeff != Complex{}) {
                kron.block(j * n, l * n, n, n).diagonal().array() -= coeff;
            }
        }
    }
    const ComplexVector rhs = Eigen::Map<const ComplexVector>(q.data(), nn);
    const ComplexVector x = kron.partialPivLu().solve(rhs);
    return Eigen::Map<const ComplexMatrix>(x.data(), n, n);
}

double hermitian_condition(const ComplexMatrix& s) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(s);
    if (ev.size() == 0) {
        return 1.0;
    }
    const double largest = ev.cwiseAbs().maxCoeff();
    const double smallest = ev.cwiseAbs().minCoeff();
    if (smallest == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return largest / smallest;
}

} // namespace gbdt
