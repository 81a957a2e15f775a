#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gbdt/darboux.hpp"
#include "gbdt/engine.hpp"

namespace gbdt {

enum class Verdict { Pass, Fail, NotApplicable };

std::string_view to_string(Verdict verdict);

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    std::optional<double> convergence_ratio;
    Verdict verdict = Verdict::Fail;
    std::size_t skipped = 0;  // probe points dropped because S(t) was singular
    std::string detail;
};

struct VerificationReport {
    std::string scenario_digest;
    std::vector<std::string> validation_errors;
    std::vector<CheckResult> checks;  // sorted by name

    bool passed() const;
    const CheckResult* find(std::string_view name) const;
};

/// Named tolerances; every field can be overridden by name.
struct Tolerances {
    double identity = 1e-8;          // × (1 + ‖Π(0)‖²_F)
    double hermitian = 1e-10;
    double unitarity = 1e-10;
    double spectrum = 1e-9;
    double quadratic_form = 1e-10;   // × (1 + ‖ψ̃*H̃ψ̃‖_F)
    double fd_residual = 1e-3;       // relative, at the coarse step
    double energy = 1e-3;            // relative, at the coarse level
    double closed_form = 1e-8;       // relative
    double monotonicity = 1e-12;
    double band_low = 3.5;
    double band_high = 4.5;
    double unitarity_condition = 1e8;
    double singular_condition = 1e12;
    double fd_step = 1e-2;           // coarse central-difference step in t

    /// Returns false for an unknown name.
    bool set(std::string_view name, double value);
    std::vector<std::pair<std::string, double>> entries() const;
};

/// Axis-aligned box a_k ≤ ζ_k ≤ b_k sampled by a tensor grid.
struct BoxDomain {
    std::vector<std::pair<double, double>> bounds;
    std::vector<std::size_t> grid;  // points per axis, each ≥ 2

    /// Throws Error{InvalidArgument}/Error{Shape} when malformed for r axes.
    void validate(std::size_t r) const;
    BoxDomain refined() const;  // halves every spacing: N → 2N − 1
    std::size_t point_count() const;
};

/// Probe times (trajectory indices) and spatial probe points shared by the
/// finite-difference checks. `coarse_offset` and `fine_offset` are the
/// central-difference half-widths h and h/2 in units of the trajectory step.
struct ProbePlan {
    std::size_t coarse_offset = 0;
    std::size_t fine_offset = 0;
    std::vector<std::size_t> time_indices;
    std::vector<std::vector<double>> zetas;
};

/// 5 uniformly spaced interior times and 3 seeded points in [−1, 1]^r.
ProbePlan make_probe_plan(const Trajectory& trajectory, std::size_t r, std::uint64_t seed,
                          double fd_step, std::size_t time_count = 5,
                          std::size_t point_count = 3);

CheckResult check_identity(const Trajectory& trajectory, const GbdtTriple& triple,
                           const Tolerances& tol = {});

CheckResult check_hermiticity(const Trajectory& trajectory, const GbdtTriple& triple,
                              const HamiltonianFamily& family, const ProbePlan& plan,
                              const Tolerances& tol = {});

CheckResult check_unitarity(const Trajectory& trajectory, const GbdtTriple& triple,
                            const ProbePlan& plan, const Tolerances& tol = {});

CheckResult check_spectrum(const Trajectory& trajectory, const GbdtTriple& triple,
                           const HamiltonianFamily& family, const ProbePlan& plan,
                           const Tolerances& tol = {});

/// ‖Δ_tψ̃ − Σ_k H̃_k ∂ψ̃/∂ζ_k‖_F with central Δ_t and analytic ∂/∂ζ_k.
CheckResult check_pde(const Trajectory& trajectory, const GbdtTriple& triple,
                      const HamiltonianFamily& family, const ProbePlan& plan,
                      const Tolerances& tol = {});

/// ‖Δ_t[Π*S^{-1}] − i Σ_k H̃_k Π*S^{-1}(A − c_kI)^{-1}‖_F.
CheckResult check_derivative_relation(const Trajectory& trajectory, const GbdtTriple& triple,
                                      const HamiltonianFamily& family, const ProbePlan& plan,
                                      const Tolerances& tol = {});

/// ‖Δ_t[Π*S^{-1}Π] − Σ_k (H̃_k − H_k)‖_F.
CheckResult check_conservation(const Trajectory& trajectory, const GbdtTriple& triple,
                               const HamiltonianFamily& family, const ProbePlan& plan,
                               const Tolerances& tol = {});

struct EnergyProbe {
    double t = 0.0;
    double lhs[2] = {0.0, 0.0};  // [coarse, fine]
    double rhs[2] = {0.0, 0.0};
};

struct EnergyBoxResult {
    CheckResult check;
    std::vector<EnergyProbe> probes;
};

/// d/dt ∫_V |ψ̃h|² against Σ_k (face at b_k − face at a_k) of (ψ̃h)*H̃_k(ψ̃h),
/// both by tensor trapezoid, at the box grid and time step and again with both
/// halved.
EnergyBoxResult check_energy_box(const Trajectory& trajectory, const GbdtTriple& triple,
                                 const HamiltonianFamily& family, const BoxDomain& box,
                                 const ComplexVector& h, const ProbePlan& plan,
                                 const Tolerances& tol = {});

CheckResult check_monotonicity(const Trajectory& trajectory, const GbdtTriple& triple,
                               const HamiltonianFamily& family, const Tolerances& tol = {});

CheckResult check_quadratic_form(const Trajectory& trajectory, const GbdtTriple& triple,
                                 const HamiltonianFamily& family, const ProbePlan& plan,
                                 const Tolerances& tol = {});

CheckResult check_closed_form(const Trajectory& trajectory, const ClosedFormExample& example,
                              const Tolerances& tol = {});

} // namespace gbdt
