#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gbdt/matrix_core.hpp"

namespace gbdt {

/// Determining data {A, S(0), Π(0), c_1..c_r} of the transformation.
struct GbdtTriple {
    ComplexMatrix a;    // n×n
    ComplexMatrix s0;   // n×n Hermitian
    ComplexMatrix pi0;  // n×m
    std::vector<double> shifts;  // c_1..c_r

    Eigen::Index n() const { return a.rows(); }
    Eigen::Index m() const { return pi0.cols(); }
    std::size_t r() const { return shifts.size(); }
};

/// ‖A·S − S·A* − i·Π·Π*‖_F.
double identity_residual(const ComplexMatrix& a, const ComplexMatrix& s,
                         const ComplexMatrix& pi);

/// Scale 1 + ‖Π(0)‖²_F applied to identity tolerances.
double identity_scale(const GbdtTriple& triple);

struct TripleValidation {
    bool valid = false;
    std::optional<ErrorKind> first_violation;
    std::vector<std::string> diagnostics;
    std::optional<HermitianCertificate> s0;
    double identity_residual = 0.0;

    /// Throws Error carrying the first violation and all diagnostics.
    void require() const;
};

struct TripleTolerances {
    double identity = 1e-10;
    double hermitian = kDefaultHermitianTolerance;
    double spectral_gap = kDefaultSpectralGap;
};

/// Checks shapes, Hermiticity of S(0), distinct real shifts off σ(A), and
/// A·S(0) − S(0)·A* = i·Π(0)·Π(0)*.
TripleValidation validate_triple(const GbdtTriple& triple, const TripleTolerances& tol = {});

// Hamiltonian families --------------------------------------------------------

/// H_k ≡ diag(I_{m1}, −I_{m2}) for every k.
struct ConstantSignature {
    Eigen::Index m1 = 0;
    Eigen::Index m2 = 0;
};

/// H_k ≡ β_k*β_k with β_k the k-th row of a unitary β; r = m.
struct OrthoProjectors {
    ComplexMatrix beta;
};

struct ConstantHermitian {
    std::vector<ComplexMatrix> h;
};

/// H_k(t) = Σ_d coefficients[k][d]·t^d.
struct PolynomialHermitian {
    std::vector<std::vector<ComplexMatrix>> coefficients;
};

enum class FamilyKind { ConstantSignature, OrthoProjectors, ConstantHermitian, PolynomialHermitian };

std::string_view to_string(FamilyKind kind);

class HamiltonianFamily {
public:
    using Payload =
        std::variant<ConstantSignature, OrthoProjectors, ConstantHermitian, PolynomialHermitian>;

    static HamiltonianFamily constant_signature(Eigen::Index m1, Eigen::Index m2);
    /// Throws Error{NotOrthonormal} unless ‖ββ* − I‖_F ≤ tolerance.
    static HamiltonianFamily ortho_projectors(const ComplexMatrix& beta,
                                              double tolerance = 1e-10);
    static HamiltonianFamily constant_hermitian(std::vector<ComplexMatrix> h);
    static HamiltonianFamily polynomial_hermitian(
        std::vector<std::vector<ComplexMatrix>> coefficients);

    FamilyKind kind() const;
    const Payload& payload() const { return payload_; }

    Eigen::Index dim() const;
    /// Number of Hamiltonians, when fixed by the family. ConstantSignature
    /// repeats the same matrix for any r.
    std::optional<std::size_t> count() const;

    ComplexMatrix evaluate(std::size_t k, double t) const;
    std::vector<ComplexMatrix> evaluate_all(double t, std::size_t r) const;

    /// Minimum eigenvalue over H_1(t)..H_r(t).
    double min_eigenvalue(double t, std::size_t r) const;

private:
    explicit HamiltonianFamily(Payload payload) : payload_(std::move(payload)) {}
    Payload payload_;
};

/// Throws Error{Shape} if the family's dimensions do not fit the triple.
void require_compatible(const GbdtTriple& triple, const HamiltonianFamily& family);

// Evolution -------------------------------------------------------------------

struct EvolvedState {
    double t = 0.0;
    ComplexMatrix pi;  // Π(t)
    ComplexMatrix s;   // S(t)
    double s_condition = 1.0;
    double identity_residual = 0.0;
};

EvolvedState make_state(double t, ComplexMatrix pi, ComplexMatrix s, const ComplexMatrix& a);

struct Trajectory {
    std::vector<EvolvedState> states;  // strictly increasing t
    double step = 0.0;                 // uniform spacing (positive)

    /// Index of the state with t == 0.
    std::size_t origin_index() const;
};

struct StateDerivative {
    ComplexMatrix pi;
    ComplexMatrix s;
};

/// Right-hand sides of the Π/S equations with resolvents (A − c_kI)^{-1}
/// computed once.
class GbdtDynamics {
public:
    GbdtDynamics(const GbdtTriple& triple, HamiltonianFamily family,
                 double gap = kDefaultSpectralGap);

    /// Π′ = −i Σ_k R_k Π H_k(t),  S′ = −Σ_k R_k Π H_k(t) Π* R_k*.
    StateDerivative rhs(double t, const ComplexMatrix& pi) const;

    const std::vector<ComplexMatrix>& resolvents() const { return resolvents_; }
    const HamiltonianFamily& family() const { return family_; }

private:
    HamiltonianFamily family_;
    std::vector<ComplexMatrix> resolvents_;
};

StateDerivative ode_rhs(double t, const ComplexMatrix& pi, const GbdtTriple& triple,
                        const HamiltonianFamily& family);

struct TimeGrid {
    double t_end = 1.0;  // may be negative for backward integration from 0
    std::size_t steps = 1000;
};

struct EvolveOptions {
    double identity_tolerance = 1e-8;  // scaled by identity_scale(triple)
    double singular_condition = 1e12;
};

/// Classical RK4 from t = 0 with S re-symmetrized after every step. Throws
/// Error{IdentityResidual} naming the time at which the identity drifts past
/// tolerance.
Trajectory evolve(const GbdtTriple& triple, const HamiltonianFamily& family,
                  const TimeGrid& grid, const EvolveOptions& options = {});

// Closed forms ----------------------------------------------------------------

/// Π(t), S(t) in closed form for the constant-signature and orthoprojector
/// families. S(0) is derived from Sylvester solutions, never supplied.
class ClosedFormExample {
public:
    /// H_k ≡ diag(I_{m1}, −I_{m2}), Π(0) = [θ1 θ2], S(0) = C_1 + C_2 with
    /// A·C_i − C_i·A* = i·θ_i·θ_i*.
    static ClosedFormExample signature(const ComplexMatrix& a, const ComplexMatrix& theta1,
                                       const ComplexMatrix& theta2, std::vector<double> shifts,
                                       double gap = kDefaultSpectralGap);

    /// H_k ≡ β_k*β_k, r = m, S(0) = Σ_k C_k with
    /// A·C_k − C_k·A* = i·Π(0)β_k*β_kΠ(0)*.
    static ClosedFormExample projectors(const ComplexMatrix& a, const ComplexMatrix& pi0,
                                        const ComplexMatrix& beta, std::vector<double> shifts,
                                        double gap = kDefaultSpectralGap);

    const GbdtTriple& triple() const { return triple_; }
    const HamiltonianFamily& family() const { return family_; }

    /// Sylvester pieces C_i and their residuals ‖A·C − C·A* − Q‖_F.
    const std::vector<ComplexMatrix>& sylvester_solutions() const { return solutions_; }
    const std::vector<double>& sylvester_residuals() const { return residuals_; }

    EvolvedState state_at(double t) const;

private:
    ClosedFormExample(GbdtTriple triple, HamiltonianFamily family)
        : triple_(std::move(triple)), family_(std::move(family)) {}

    GbdtTriple triple_;
    HamiltonianFamily family_;
    std::vector<ComplexMatrix> resolvents_;
    std::vector<ComplexMatrix> solutions_;
    std::vector<double> residuals_;
    // Each block evolves as exp(sign·(−i)·t·generator) applied to its columns.
    std::vector<ComplexMatrix> generators_;
    std::vector<ComplexMatrix> blocks_;
    std::vector<double> signs_;
};

} // namespace gbdt
