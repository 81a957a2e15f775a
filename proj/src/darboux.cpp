#include "gbdt/darboux.hpp"

#include <sstream>

namespace gbdt {

DarbouxFrame::DarbouxFrame(const EvolvedState& state, const GbdtTriple& triple,
                           const DarbouxOptions& options)
    : t_(state.t), a_(triple.a), pi_(state.pi), shifts_(triple.shifts),
      gap_(options.spectral_gap) {
    if (state.s.rows() != triple.n() || state.pi.rows() != triple.n() ||
        state.pi.cols() != triple.m()) {
        throw Error(ErrorKind::Shape, "state dimensions do not match the triple");
    }
    const double cond = hermitian_condition(state.s);
    if (!(cond < options.singular_condition)) {
        std::ostringstream os;
        os << "S(t) is numerically singular at t = " << state.t << " (condition " << cond << ")";
        throw Error(ErrorKind::SingularS, os.str());
    }
    s_lu_.compute(state.s);
    // S is Hermitian, so Π*S^{-1} = (S^{-1}Π)*.
    pi_star_s_inv_ = s_lu_.solve(pi_).adjoint();
    resolvents_.reserve(shifts_.size());
    for (double c : shifts_) {
        resolvents_.push_back(resolvent(a_, c, gap_));
    }
}

ComplexMatrix DarbouxFrame::transfer(Complex z) const {
    const Eigen::Index m = pi_.cols();
    return ComplexMatrix::Identity(m, m) - kI * pi_star_s_inv_ * resolvent(a_, z, gap_) * pi_;
}

ComplexMatrix DarbouxFrame::transfer_at_shift(std::size_t k) const {
    const Eigen::Index m = pi_.cols();
    return ComplexMatrix::Identity(m, m) - kI * pi_star_s_inv_ * resolvents_.at(k) * pi_;
}

std::vector<ComplexMatrix> DarbouxFrame::transform(const HamiltonianFamily& family) const {
    std::vector<ComplexMatrix> out;
    out.reserve(resolvents_.size());
    for (std::size_t k = 0; k < resolvents_.size(); ++k) {
        const ComplexMatrix w = transfer_at_shift(k);
        out.push_back(w * family.evaluate(k, t_) * w.adjoint());
    }
    return out;
}

ComplexMatrix DarbouxFrame::exponential(std::span<const double> zeta) const {
    if (zeta.size() != resolvents_.size()) {
        throw Error(ErrorKind::Shape, "zeta must have one coordinate per shift c_k");
    }
    const Eigen::Index n = a_.rows();
    ComplexMatrix exponent = ComplexMatrix::Zero(n, n);
    for (std::size_t k = 0; k < zeta.size(); ++k) {
        exponent += (kI * zeta[k]) * resolvents_[k];
    }
    return expm(exponent);
}

ComplexMatrix DarbouxFrame::psi_from_exponential(const ComplexMatrix& e) const {
    return pi_star_s_inv_ * e;
}

ComplexMatrix DarbouxFrame::psi(std::span<const double> zeta) const {
    return psi_from_exponential(exponential(zeta));
}

ComplexMatrix DarbouxFrame::psi_space_derivative(std::span<const double> zeta,
                                                 std::size_t k) const {
    if (k >= resolvents_.size()) {
        throw Error(ErrorKind::InvalidArgument, "space direction index out of range");
    }
    return pi_star_s_inv_ * (kI * resolvents_[k]) * exponential(zeta);
}

ComplexMatrix DarbouxFrame::flux_factor(std::size_t k) const {
    const Eigen::Index n = a_.rows();
    const ComplexMatrix shifted_adj =
        a_.adjoint() - shifts_.at(k) * ComplexMatrix::Identity(n, n);
    return shifted_adj * s_lu_.solve(resolvents_.at(k) * pi_);
}

ComplexMatrix DarbouxFrame::quadratic_form(std::span<const double> zeta, std::size_t k,
                                           const ComplexMatrix& h_k) const {
    const ComplexMatrix e = exponential(zeta);
    const ComplexMatrix x = e.adjoint() * flux_factor(k);
    return x * h_k * x.adjoint();
}

TransferMatrix transfer(const EvolvedState& state, const GbdtTriple& triple, Complex z,
                        const DarbouxOptions& options) {
    return {state.t, z, DarbouxFrame(state, triple, options).transfer(z)};
}

TransformedHamiltonians transform_hamiltonians(const EvolvedState& state,
                                               const GbdtTriple& triple,
                                               const HamiltonianFamily& family,
                                               const DarbouxOptions& options) {
    require_compatible(triple, family);
    return {state.t, DarbouxFrame(state, triple, options).transform(family)};
}

SolutionSample psi_tilde(const EvolvedState& state, const GbdtTriple& triple,
                         std::span<const double> zeta, const DarbouxOptions& options) {
    return {state.t, std::vector<double>(zeta.begin(), zeta.end()),
            DarbouxFrame(state, triple, options).psi(zeta)};
}

ComplexMatrix psi_tilde_space_derivative(const EvolvedState& state, const GbdtTriple& triple,
                                         std::span<const double> zeta, std::size_t k,
                                         const DarbouxOptions& options) {
    return DarbouxFrame(state, triple, options).psi_space_derivative(zeta, k);
}

ComplexMatrix quadratic_form(const EvolvedState& state, const GbdtTriple& triple,
                             const HamiltonianFamily& family, std::span<const double> zeta,
                             std::size_t k, const DarbouxOptions& options) {
    require_compatible(triple, family);
    return DarbouxFrame(state, triple, options).quadratic_form(zeta, k,
                                                               family.evaluate(k, state.t));
}

} // namespace gbdt
