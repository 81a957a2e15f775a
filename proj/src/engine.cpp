#include "gbdt/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gbdt {

double identity_residual(const ComplexMatrix& a, const ComplexMatrix& s,
                         const ComplexMatrix& pi) {
    return (a * s - s * a.adjoint() - kI * pi * pi.adjoint()).norm();
}

double identity_scale(const GbdtTriple& triple) {
    return 1.0 + triple.pi0.squaredNorm();
}

void TripleValidation::require() const {
    if (valid) {
        return;
    }
    std::ostringstream os;
    os << "invalid GBDT triple:";
    for (const auto& d : diagnostics) {
        os << "\n  - " << d;
    }
    throw Error(first_violation.value_or(ErrorKind::InvalidArgument), os.str());
}

TripleValidation validate_triple(const GbdtTriple& triple, const TripleTolerances& tol) {
    TripleValidation out;
    auto fail = [&](ErrorKind kind, std::string message) {
        if (!out.first_violation) {
            out.first_violation = kind;
        }
        out.diagnostics.push_back(std::move(message));
    };

    const Eigen::Index n = triple.a.rows();
    if (n == 0 || triple.a.cols() != n) {
        fail(ErrorKind::Shape, "A must be a non-empty square matrix");
    }
    if (triple.s0.rows() != n || triple.s0.cols() != n) {
        fail(ErrorKind::Shape, "S(0) must be n x n with n = rows(A)");
    }
    if (triple.pi0.rows() != n || triple.pi0.cols() == 0) {
        fail(ErrorKind::Shape, "Pi(0) must be n x m with n = rows(A) and m >= 1");
    }
    if (triple.shifts.empty()) {
        fail(ErrorKind::Shape, "at least one shift c_k is required");
    }
    if (!out.diagnostics.empty()) {
        return out;
    }
    if (!triple.a.allFinite() || !triple.s0.allFinite() || !triple.pi0.allFinite()) {
        fail(ErrorKind::NonFinite, "triple has non-finite entries");
        return out;
    }
    for (double c : triple.shifts) {
        if (!std::isfinite(c)) {
            fail(ErrorKind::NonFinite, "shift c_k is not finite");
            return out;
        }
    }

    const double asym = asymmetry(triple.s0);
    if (asym > tol.hermitian) {
        std::ostringstream os;
        os << "S(0) is not Hermitian: ||S0 - S0*||_F = " << asym;
        fail(ErrorKind::NotHermitian, os.str());
    } else {
        out.s0 = HermitianCertificate{hermitian_part(triple.s0), asym};
    }

    for (std::size_t i = 0; i < triple.shifts.size(); ++i) {
        for (std::size_t k = i + 1; k < triple.shifts.size(); ++k) {
            if (triple.shifts[i] == triple.shifts[k]) {
                std::ostringstream os;
                os << "duplicate shift c_" << i + 1 << " = c_" << k + 1 << " = "
                   << triple.shifts[i] << " (shifts must be pairwise distinct)";
                fail(ErrorKind::DuplicateShift, os.str());
            }
        }
    }

    const auto eig = spectrum(triple.a);
    for (std::size_t k = 0; k < triple.shifts.size(); ++k) {
        double dist = std::numeric_limits<double>::infinity();
        for (Complex lambda : eig) {
            dist = std::min(dist, std::abs(lambda - triple.shifts[k]));
        }
        if (dist <= tol.spectral_gap) {
            std::ostringstream os;
            os << "shift c_" << k + 1 << " = " << triple.shifts[k]
               << " lies in the spectrum of A (distance " << dist << ")";
            fail(ErrorKind::SpectralGap, os.str());
        }
    }

    const ComplexMatrix s0 = out.s0 ? out.s0->matrix : triple.s0;
    out.identity_residual = identity_residual(triple.a, s0, triple.pi0);
    const double bound = tol.identity * identity_scale(triple);
    if (out.identity_residual > bound) {
        std::ostringstream os;
        os << "identity A S0 - S0 A* = i Pi0 Pi0* violated: residual " << out.identity_residual
           << " > " << bound;
        fail(ErrorKind::IdentityResidual, os.str());
    }

    out.valid = out.diagnostics.empty();
    return out;
}

// Hamiltonian families --------------------------------------------------------

std::string_view to_string(FamilyKind kind) {
    switch (kind) {
    case FamilyKind::ConstantSignature: return "ConstantSignature";
    case FamilyKind::OrthoProjectors: return "OrthoProjectors";
    case FamilyKind::ConstantHermitian: return "ConstantHermitian";
    case FamilyKind::PolynomialHermitian: return "PolynomialHermitian";
    }
    return "unknown";
}

HamiltonianFamily HamiltonianFamily::constant_signature(Eigen::Index m1, Eigen::Index m2) {
    if (m1 < 0 || m2 < 0 || m1 + m2 == 0) {
        throw Error(ErrorKind::Shape, "signature blocks need m1, m2 >= 0 and m1 + m2 >= 1");
    }
    return HamiltonianFamily(ConstantSignature{m1, m2});
}

HamiltonianFamily HamiltonianFamily::ortho_projectors(const ComplexMatrix& beta,
                                                      double tolerance) {
    require_square(beta, "beta");
    require_finite(beta, "beta");
    if (beta.rows() == 0) {
        throw Error(ErrorKind::Shape, "beta must be non-empty");
    }
    const double defect =
        (beta * beta.adjoint() - ComplexMatrix::Identity(beta.rows(), beta.rows())).norm();
    if (defect > tolerance) {
        std::ostringstream os;
        os << "rows of beta are not orthonormal: ||beta beta* - I||_F = " << defect;
        throw Error(ErrorKind::NotOrthonormal, os.str());
    }
    return HamiltonianFamily(OrthoProjectors{beta});
}

HamiltonianFamily HamiltonianFamily::constant_hermitian(std::vector<ComplexMatrix> h) {
    if (h.empty()) {
        throw Error(ErrorKind::Shape, "ConstantHermitian needs at least one matrix");
    }
    const Eigen::Index m = h.front().rows();
    for (auto& hk : h) {
        if (hk.rows() != m || hk.cols() != m || m == 0) {
            throw Error(ErrorKind::Shape, "Hamiltonians must all be m x m");
        }
        hk = certify_hermitian(hk).matrix;
    }
    return HamiltonianFamily(ConstantHermitian{std::move(h)});
}

HamiltonianFamily HamiltonianFamily::polynomial_hermitian(
    std::vector<std::vector<ComplexMatrix>> coefficients) {
    if (coefficients.empty()) {
        throw Error(ErrorKind::Shape, "PolynomialHermitian needs at least one Hamiltonian");
    }
    Eigen::Index m = -1;
    for (auto& poly : coefficients) {
        if (poly.empty()) {
            throw Error(ErrorKind::Shape, "each polynomial needs at least one coefficient");
        }
        for (auto& coeff : poly) {
            if (m < 0) {
                m = coeff.rows();
            }
            if (coeff.rows() != m || coeff.cols() != m || m == 0) {
                throw Error(ErrorKind::Shape, "polynomial coefficients must all be m x m");
            }
            coeff = certify_hermitian(coeff).matrix;
        }
    }
    return HamiltonianFamily(PolynomialHermitian{std::move(coefficients)});
}

FamilyKind HamiltonianFamily::kind() const {
    return static_cast<FamilyKind>(payload_.index());
}

Eigen::Index HamiltonianFamily::dim() const {
    return std::visit(
        [](const auto& p) -> Eigen::Index {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ConstantSignature>) {
                return p.m1 + p.m2;
            } else if constexpr (std::is_same_v<T, OrthoProjectors>) {
                return p.beta.rows();
            } else if constexpr (std::is_same_v<T, ConstantHermitian>) {
                return p.h.front().rows();
            } else {
                return p.coefficients.front().front().rows();
            }
        },
        payload_);
}

std::optional<std::size_t> HamiltonianFamily::count() const {
    return std::visit(
        [](const auto& p) -> std::optional<std::size_t> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ConstantSignature>) {
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, OrthoProjectors>) {
                return static_cast<std::size_t>(p.beta.rows());
            } else if constexpr (std::is_same_v<T, ConstantHermitian>) {
                return p.h.size();
            } else {
                return p.coefficients.size();
            }
        },
        payload_);
}

ComplexMatrix HamiltonianFamily::evaluate(std::size_t k, double t) const {
    const auto fixed = count();
    if (fixed && k >= *fixed) {
        throw Error(ErrorKind::InvalidArgument, "Hamiltonian index out of range");
    }
    return std::visit(
        [&](const auto& p) -> ComplexMatrix {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ConstantSignature>) {
                ComplexMatrix j = ComplexMatrix::Identity(p.m1 + p.m2, p.m1 + p.m2);
                j.bottomRightCorner(p.m2, p.m2) *= -1.0;
                return j;
            } else if constexpr (std::is_same_v<T, OrthoProjectors>) {
                const auto row = p.beta.row(static_cast<Eigen::Index>(k));
                return row.adjoint() * row;
            } else if constexpr (std::is_same_v<T, ConstantHermitian>) {
                return p.h[k];
            } else {
                // Horner
                const auto& poly = p.coefficients[k];
                ComplexMatrix value = poly.back();
                for (auto it = poly.rbegin() + 1; it != poly.rend(); ++it) {
                    value = (value * t + *it).eval();
                }
                return value;
            }
        },
        payload_);
}

std::vector<ComplexMatrix> HamiltonianFamily::evaluate_all(double t, std::size_t r) const {
    std::vector<ComplexMatrix> out;
    out.reserve(r);
    for (std::size_t k = 0; k < r; ++k) {
        out.push_back(evaluate(k, t));
    }
    return out;
}

double HamiltonianFamily::min_eigenvalue(double t, std::size_t r) const {
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < r; ++k) {
        lowest = std::min(lowest, hermitian_eigenvalues(evaluate(k, t)).minCoeff());
    }
    return lowest;
}

void require_compatible(const GbdtTriple& triple, const HamiltonianFamily& family) {
    if (family.dim() != triple.m()) {
        std::ostringstream os;
        os << "Hamiltonians are " << family.dim() << "x" << family.dim()
           << " but Pi(0) has m = " << triple.m() << " columns";
        throw Error(ErrorKind::Shape, os.str());
    }
    if (const auto fixed = family.count(); fixed && *fixed != triple.r()) {
        std::ostringstream os;
        os << "family defines " << *fixed << " Hamiltonians but " << triple.r()
           << " shifts c_k were given";
        throw Error(ErrorKind::Shape, os.str());
    }
}

// Evolution -------------------------------------------------------------------

EvolvedState make_state(double t, ComplexMatrix pi, ComplexMatrix s, const ComplexMatrix& a) {
    EvolvedState state;
    state.t = t;
    state.pi = std::move(pi);
    state.s = hermitian_part(s);
    state.s_condition = hermitian_condition(state.s);
    state.identity_residual = identity_residual(a, state.s, state.pi);
    return state;
}

std::size_t Trajectory::origin_index() const {
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].t == 0.0) {
            return i;
        }
    }
    throw Error(ErrorKind::InvalidArgument, "trajectory does not contain t = 0");
}

GbdtDynamics::GbdtDynamics(const GbdtTriple& triple, HamiltonianFamily family, double gap)
    : family_(std::move(family)) {
    require_compatible(triple, family_);
    resolvents_.reserve(triple.r());
    for (double c : triple.shifts) {
        resolvents_.push_back(resolvent(triple.a, c, gap));
    }
}

StateDerivative GbdtDynamics::rhs(double t, const ComplexMatrix& pi) const {
    const Eigen::Index n = pi.rows();
    StateDerivative d{ComplexMatrix::Zero(n, pi.cols()), ComplexMatrix::Zero(n, n)};
    for (std::size_t k = 0; k < resolvents_.size(); ++k) {
        const ComplexMatrix h = family_.evaluate(k, t);
        const ComplexMatrix rpi = resolvents_[k] * pi;
        const ComplexMatrix rpih = rpi * h;
        d.pi.noalias() -= kI * rpih;
        d.s.noalias() -= rpih * rpi.adjoint();
    }
    d.s = hermitian_part(d.s);
    return d;
}

StateDerivative ode_rhs(double t, const ComplexMatrix& pi, const GbdtTriple& triple,
                        const HamiltonianFamily& family) {
    return GbdtDynamics(triple, family).rhs(t, pi);
}

Trajectory evolve(const GbdtTriple& triple, const HamiltonianFamily& family,
                  const TimeGrid& grid, const EvolveOptions& options) {
    validate_triple(triple).require();
    if (grid.steps == 0 || !std::isfinite(grid.t_end) || grid.t_end == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "time grid needs t_end != 0 and steps >= 1");
    }
    const GbdtDynamics dynamics(triple, family);
    const double dt = grid.t_end / static_cast<double>(grid.steps);
    const double bound = options.identity_tolerance * identity_scale(triple);

    Trajectory traj;
    traj.step = std::abs(dt);
    traj.states.reserve(grid.steps + 1);
    traj.states.push_back(make_state(0.0, triple.pi0, triple.s0, triple.a));

    ComplexMatrix pi = triple.pi0;
    ComplexMatrix s = hermitian_part(triple.s0);
    for (std::size_t i = 0; i < grid.steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const auto k1 = dynamics.rhs(t, pi);
        const auto k2 = dynamics.rhs(t + 0.5 * dt, pi + 0.5 * dt * k1.pi);
        const auto k3 = dynamics.rhs(t + 0.5 * dt, pi + 0.5 * dt * k2.pi);
        const auto k4 = dynamics.rhs(t + dt, pi + dt * k3.pi);
        pi += (dt / 6.0) * (k1.pi + 2.0 * k2.pi + 2.0 * k3.pi + k4.pi);
        s += (dt / 6.0) * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
        s = hermitian_part(s);

        const double t_next = static_cast<double>(i + 1) * dt;
        auto state = make_state(t_next, pi, s, triple.a);
        if (!(state.identity_residual <= bound)) {
            std::ostringstream os;
            os << "identity A S - S A* = i Pi Pi* drifted at t = " << t_next << ": residual "
               << state.identity_residual << " > " << bound;
            throw Error(ErrorKind::IdentityResidual, os.str());
        }
        traj.states.push_back(std::move(state));
    }
    if (dt < 0.0) {
        std::reverse(traj.states.begin(), traj.states.end());
    }
    return traj;
}

// Closed forms ----------------------------------------------------------------

namespace {

ComplexMatrix sum_of(const std::vector<ComplexMatrix>& ms, Eigen::Index n) {
    ComplexMatrix total = ComplexMatrix::Zero(n, n);
    for (const auto& m : ms) {
        total += m;
    }
    return total;
}

} // namespace

ClosedFormExample ClosedFormExample::signature(const ComplexMatrix& a,
                                               const ComplexMatrix& theta1,
                                               const ComplexMatrix& theta2,
                                               std::vector<double> shifts, double gap) {
    require_square(a, "A");
    const Eigen::Index n = a.rows();
    if (theta1.rows() != n || theta2.rows() != n) {
        throw Error(ErrorKind::Shape, "theta blocks must have n = rows(A) rows");
    }
    const Eigen::Index m1 = theta1.cols();
    const Eigen::Index m2 = theta2.cols();

    ComplexMatrix pi0(n, m1 + m2);
    pi0 << theta1, theta2;
    GbdtTriple triple{a, ComplexMatrix::Zero(n, n), pi0, std::move(shifts)};
    ClosedFormExample cf(triple, HamiltonianFamily::constant_signature(m1, m2));

    for (double c : cf.triple_.shifts) {
        cf.resolvents_.push_back(resolvent(a, c, gap));
    }
    const ComplexMatrix total = sum_of(cf.resolvents_, n);
    const std::pair<const ComplexMatrix*, double> parts[] = {{&theta1, 1.0}, {&theta2, -1.0}};
    for (const auto& [theta, sign] : parts) {
        const ComplexMatrix q = kI * (*theta) * theta->adjoint();
        ComplexMatrix c = hermitian_part(solve_sylvester(a, q, gap));
        cf.residuals_.push_back((a * c - c * a.adjoint() - q).norm());
        cf.solutions_.push_back(std::move(c));
        cf.generators_.push_back(total);
        cf.blocks_.push_back(*theta);
        cf.signs_.push_back(sign);
    }
    // Each C_i is Hermitian, so their sum is too, entry for entry.
    cf.triple_.s0 = cf.solutions_[0] + cf.solutions_[1];
    validate_triple(cf.triple_, TripleTolerances{1e-10, kDefaultHermitianTolerance, gap})
        .require();
    return cf;
}

ClosedFormExample ClosedFormExample::projectors(const ComplexMatrix& a,
                                                const ComplexMatrix& pi0,
                                                const ComplexMatrix& beta,
                                                std::vector<double> shifts, double gap) {
    require_square(a, "A");
    const Eigen::Index n = a.rows();
    auto family = HamiltonianFamily::ortho_projectors(beta);
    const Eigen::Index m = beta.rows();
    if (pi0.rows() != n || pi0.cols() != m) {
        throw Error(ErrorKind::Shape, "Pi(0) must be n x m with m = rows(beta)");
    }
    if (shifts.size() != static_cast<std::size_t>(m)) {
        throw Error(ErrorKind::Shape, "orthoprojector family requires r = m shifts");
    }

    GbdtTriple triple{a, ComplexMatrix::Zero(n, n), pi0, std::move(shifts)};
    ClosedFormExample cf(triple, std::move(family));
    for (Eigen::Index k = 0; k < m; ++k) {
        const ComplexMatrix rk = resolvent(a, cf.triple_.shifts[static_cast<std::size_t>(k)], gap);
        const ComplexMatrix column = pi0 * beta.row(k).adjoint();  // Π(0)β_k*
        const ComplexMatrix q = kI * column * column.adjoint();
        ComplexMatrix c = hermitian_part(solve_sylvester(a, q, gap));
        cf.residuals_.push_back((a * c - c * a.adjoint() - q).norm());
        cf.solutions_.push_back(std::move(c));
        cf.resolvents_.push_back(rk);
        cf.generators_.push_back(rk);
        cf.blocks_.push_back(column);
        cf.signs_.push_back(1.0);
    }
    cf.triple_.s0 = sum_of(cf.solutions_, n);
    validate_triple(cf.triple_, TripleTolerances{1e-10, kDefaultHermitianTolerance, gap})
        .require();
    return cf;
}

EvolvedState ClosedFormExample::state_at(double t) const {
    const Eigen::Index n = triple_.n();
    Eigen::Index cols = 0;
    for (const auto& b : blocks_) {
        cols += b.cols();
    }
    ComplexMatrix stacked(n, cols);
    ComplexMatrix s = ComplexMatrix::Zero(n, n);
    Eigen::Index offset = 0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const ComplexMatrix e = expm(-kI * (signs_[b] * t) * generators_[b]);
        stacked.middleCols(offset, blocks_[b].cols()) = e * blocks_[b];
        offset += blocks_[b].cols();
        s += e * solutions_[b] * e.adjoint();
    }
    ComplexMatrix pi = stacked;
    if (const auto* proj = std::get_if<OrthoProjectors>(&family_.payload())) {
        pi = stacked * proj->beta;
    }
    return make_state(t, std::move(pi), std::move(s), triple_.a);
}

} // namespace gbdt
