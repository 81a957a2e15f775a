#include "gbdt/scenario.hpp"

#include <algorithm>

namespace gbdt {

namespace {

TripleTolerances triple_tolerances(const Tolerances& tol) {
    TripleTolerances out;
    out.hermitian = tol.hermitian;
    return out;
}

} // namespace

ResolvedScenario resolve(const Scenario& scenario) {
    return std::visit(
        [&](const auto& spec) -> ResolvedScenario {
            using T = std::decay_t<decltype(spec)>;
            if constexpr (std::is_same_v<T, ExplicitTriple>) {
                if (!scenario.family) {
                    throw Error(ErrorKind::InvalidArgument,
                                "an explicit triple needs a Hamiltonian family");
                }
                GbdtTriple triple{spec.a, spec.s0, spec.pi0, spec.shifts};
                validate_triple(triple, triple_tolerances(scenario.tolerances)).require();
                triple.s0 = hermitian_part(triple.s0);
                require_compatible(triple, *scenario.family);
                return {std::move(triple), *scenario.family, std::nullopt};
            } else {
                if (scenario.family) {
                    throw Error(ErrorKind::InvalidArgument,
                                "example scenarios imply their Hamiltonian family; omit it");
                }
                std::optional<ClosedFormExample> cf;
                if constexpr (std::is_same_v<T, SignatureExample>) {
                    cf = ClosedFormExample::signature(spec.a, spec.theta1, spec.theta2,
                                                      spec.shifts);
                } else {
                    cf = ClosedFormExample::projectors(spec.a, spec.pi0, spec.beta, spec.shifts);
                }
                return {cf->triple(), cf->family(), std::move(cf)};
            }
        },
        scenario.triple);
}

VerificationReport run_suite(const Scenario& scenario, const std::string& digest) {
    VerificationReport report;
    report.scenario_digest = digest;

    std::optional<ResolvedScenario> resolved;
    try {
        resolved = resolve(scenario);
    } catch (const Error& e) {
        report.validation_errors.emplace_back(e.what());
        return report;
    }
    const auto& tol = scenario.tolerances;
    const auto& triple = resolved->triple;
    const auto& family = resolved->family;

    Trajectory trajectory;
    try {
        EvolveOptions options;
        options.identity_tolerance = tol.identity;
        options.singular_condition = tol.singular_condition;
        trajectory = evolve(triple, family, scenario.time, options);
    } catch (const Error& e) {
        CheckResult failed;
        failed.name = "identity";
        failed.tolerance = tol.identity * identity_scale(triple);
        failed.verdict = Verdict::Fail;
        failed.detail = e.what();
        report.checks.push_back(std::move(failed));
        return report;
    }

    const ProbePlan plan = make_probe_plan(trajectory, triple.r(), scenario.seed, tol.fd_step);

    auto& checks = report.checks;
    checks.push_back(check_identity(trajectory, triple, tol));
    checks.push_back(check_hermiticity(trajectory, triple, family, plan, tol));
    checks.push_back(check_unitarity(trajectory, triple, plan, tol));
    checks.push_back(check_spectrum(trajectory, triple, family, plan, tol));
    checks.push_back(check_pde(trajectory, triple, family, plan, tol));
    checks.push_back(check_derivative_relation(trajectory, triple, family, plan, tol));
    checks.push_back(check_conservation(trajectory, triple, family, plan, tol));
    checks.push_back(check_monotonicity(trajectory, triple, family, tol));
    checks.push_back(check_quadratic_form(trajectory, triple, family, plan, tol));
    if (resolved->closed_form) {
        checks.push_back(check_closed_form(trajectory, *resolved->closed_form, tol));
    }
    if (scenario.box) {
        ComplexVector h = ComplexVector::Zero(triple.n());
        if (scenario.h_vector) {
            h = *scenario.h_vector;
        } else {
            h(0) = 1.0;
        }
        checks.push_back(
            check_energy_box(trajectory, triple, family, *scenario.box, h, plan, tol).check);
    } else {
        CheckResult skipped;
        skipped.name = "energy_box";
        skipped.tolerance = tol.energy;
        skipped.verdict = Verdict::NotApplicable;
        skipped.detail = "no box domain in scenario";
        checks.push_back(std::move(skipped));
    }

    std::sort(checks.begin(), checks.end(),
              [](const CheckResult& x, const CheckResult& y) { return x.name < y.name; });
    return report;
}

} // namespace gbdt
