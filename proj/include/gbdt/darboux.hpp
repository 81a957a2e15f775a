#pragma once

#include <span>
#include <vector>

#include "gbdt/engine.hpp"

namespace gbdt {

struct TransferMatrix {
    double t = 0.0;
    Complex z;
    ComplexMatrix value;  // m×m
};

struct TransformedHamiltonians {
    double t = 0.0;
    std::vector<ComplexMatrix> h_tilde;
};

struct SolutionSample {
    double t = 0.0;
    std::vector<double> zeta;
    ComplexMatrix value;  // m×n
};

struct DarbouxOptions {
    double singular_condition = 1e12;
    double spectral_gap = kDefaultSpectralGap;
};

/// Everything the transformed system needs at one time t: a factorization
/// of S(t), Π(t)*S(t)^{-1}, and the resolvents (A − c_kI)^{-1}.
///
/// Construction throws Error{SingularS} when the condition number of S(t)
/// reaches `singular_condition`.
class DarbouxFrame {
public:
    DarbouxFrame(const EvolvedState& state, const GbdtTriple& triple,
                 const DarbouxOptions& options = {});

    double t() const { return t_; }
    const ComplexMatrix& pi_star_s_inv() const { return pi_star_s_inv_; }
    const std::vector<ComplexMatrix>& resolvents() const { return resolvents_; }

    /// w_A(t, z) = I − i Π*S^{-1}(A − zI)^{-1}Π.
    ComplexMatrix transfer(Complex z) const;
    /// w_A(t, c_k), reusing the stored resolvent.
    ComplexMatrix transfer_at_shift(std::size_t k) const;

    /// H̃_k = w H_k w* with w = w_A(t, c_k).
    std::vector<ComplexMatrix> transform(const HamiltonianFamily& family) const;

    /// exp{i Σ_k ζ_k (A − c_kI)^{-1}}.
    ComplexMatrix exponential(std::span<const double> zeta) const;

    /// ψ̃(t, ζ) = Π*S^{-1} exp{i Σ_k ζ_k (A − c_kI)^{-1}}.
    ComplexMatrix psi(std::span<const double> zeta) const;
    ComplexMatrix psi_from_exponential(const ComplexMatrix& e) const;

    /// ∂ψ̃/∂ζ_k = Π*S^{-1}·i(A − c_kI)^{-1}·exp{…}.
    ComplexMatrix psi_space_derivative(std::span<const double> zeta, std::size_t k) const;

    /// X_k = (A* − c_kI) S^{-1} (A − c_kI)^{-1} Π, so that
    /// S^{-1}Π w_A(t, c_k) = X_k.
    ComplexMatrix flux_factor(std::size_t k) const;

    /// E*X_k H_k X_k*E: the simplified form of ψ̃*H̃_kψ̃.
    ComplexMatrix quadratic_form(std::span<const double> zeta, std::size_t k,
                                 const ComplexMatrix& h_k) const;

private:
    double t_ = 0.0;
    ComplexMatrix a_;
    ComplexMatrix pi_;
    std::vector<double> shifts_;
    Eigen::PartialPivLU<ComplexMatrix> s_lu_;
    ComplexMatrix pi_star_s_inv_;
    std::vector<ComplexMatrix> resolvents_;
    double gap_ = kDefaultSpectralGap;
};

TransferMatrix transfer(const EvolvedState& state, const GbdtTriple& triple, Complex z,
                        const DarbouxOptions& options = {});

TransformedHamiltonians transform_hamiltonians(const EvolvedState& state,
                                               const GbdtTriple& triple,
                                               const HamiltonianFamily& family,
                                               const DarbouxOptions& options = {});

SolutionSample psi_tilde(const EvolvedState& state, const GbdtTriple& triple,
                         std::span<const double> zeta, const DarbouxOptions& options = {});

ComplexMatrix psi_tilde_space_derivative(const EvolvedState& state, const GbdtTriple& triple,
                                         std::span<const double> zeta, std::size_t k,
                                         const DarbouxOptions& options = {});

/// Value of ψ̃*H̃_kψ̃ via the simplified sandwich
/// E*(A* − c_kI)S^{-1}(A − c_kI)^{-1}ΠH_kΠ*(A* − c_kI)^{-1}S^{-1}(A − c_kI)E.
ComplexMatrix quadratic_form(const EvolvedState& state, const GbdtTriple& triple,
                             const HamiltonianFamily& family, std::span<const double> zeta,
                             std::size_t k, const DarbouxOptions& options = {});

} // namespace gbdt
