#include <gtest/gtest.h>

#include "gbdt/scenario.hpp"
#include "gbdt/verification.hpp"
#include "test_support.hpp"

namespace {

using namespace gbdt;
using gbdt::testing::Rng;
namespace desk = gbdt::testing::desk;

Trajectory desk_trajectory() { return evolve(desk::triple(), desk::family(), {1.0, 1000}); }

GbdtTriple stationary_triple() {
    GbdtTriple t;
    t.a = ComplexMatrix::Zero(2, 2);
    t.a.diagonal() << 3.0, -2.0;
    t.s0 = ComplexMatrix::Zero(2, 2);
    t.s0.diagonal() << 1.5, 0.5;
    t.pi0 = ComplexMatrix::Zero(2, 1);
    t.shifts = {0.0};
    return t;
}

void expect_in_band(const CheckResult& r) {
    ASSERT_TRUE(r.convergence_ratio.has_value()) << r.name << ": " << r.detail;
    EXPECT_GE(*r.convergence_ratio, 3.5) << r.name;
    EXPECT_LE(*r.convergence_ratio, 4.5) << r.name;
}

TEST(ProbePlan, DeterministicAndInterior) {
    const auto traj = desk_trajectory();
    const auto a = make_probe_plan(traj, 2, 17, 1e-2);
    const auto b = make_probe_plan(traj, 2, 17, 1e-2);
    EXPECT_EQ(a.time_indices, b.time_indices);
    EXPECT_EQ(a.zetas, b.zetas);
    EXPECT_EQ(a.coarse_offset, 10u);
    EXPECT_EQ(a.fine_offset, 5u);
    ASSERT_EQ(a.time_indices.size(), 5u);
    ASSERT_EQ(a.zetas.size(), 3u);
    for (std::size_t i : a.time_indices) {
        EXPECT_GE(i, a.coarse_offset);
        EXPECT_LT(i + a.coarse_offset, traj.states.size());
    }
    for (const auto& z : a.zetas) {
        ASSERT_EQ(z.size(), 2u);
        for (double v : z) {
            EXPECT_GE(v, -1.0);
            EXPECT_LE(v, 1.0);
        }
    }
    EXPECT_NE(make_probe_plan(traj, 2, 18, 1e-2).zetas, a.zetas);
}

TEST(BoxDomain, RefinementAndValidation) {
    BoxDomain box{{{0.0, 1.0}, {-1.0, 2.0}}, {64, 3}};
    EXPECT_NO_THROW(box.validate(2));
    EXPECT_THROW(box.validate(1), Error);
    const auto fine = box.refined();
    EXPECT_EQ(fine.grid, (std::vector<std::size_t>{127, 5}));
    EXPECT_EQ(fine.point_count(), 635u);
    BoxDomain bad{{{1.0, 0.0}}, {4}};
    EXPECT_THROW(bad.validate(1), Error);
    BoxDomain thin{{{0.0, 1.0}}, {1}};
    EXPECT_THROW(thin.validate(1), Error);
}

TEST(Tolerances, SetByName) {
    Tolerances tol;
    EXPECT_TRUE(tol.set("unitarity", 1e-9));
    EXPECT_DOUBLE_EQ(tol.unitarity, 1e-9);
    EXPECT_TRUE(tol.set("band_high", 5.0));
    EXPECT_DOUBLE_EQ(tol.band_high, 5.0);
    EXPECT_FALSE(tol.set("no_such_tolerance", 1.0));
    EXPECT_EQ(tol.entries().size(), 14u);
}

TEST(CheckIdentity, DeskZeroAndSignatureExample) {
    const auto traj = desk_trajectory();
    const auto r = check_identity(traj, desk::triple());
    EXPECT_EQ(r.verdict, Verdict::Pass);
    EXPECT_LE(r.residual, 1e-10);
    EXPECT_DOUBLE_EQ(r.tolerance, 2e-8);

    const auto zt = stationary_triple();
    const auto zr = check_identity(evolve(zt, HamiltonianFamily::constant_signature(1, 0),
                                          {1.0, 100}),
                                   zt);
    EXPECT_EQ(zr.residual, 0.0);

    Rng rng(100);
    const auto ex = ClosedFormExample::signature(
        gbdt::testing::random_spread_matrix(rng, 4, 1.0), gbdt::testing::random_matrix(rng, 4, 2),
        gbdt::testing::random_matrix(rng, 4, 1), {0.3, -1.1});
    Trajectory closed;
    closed.step = 0.01;
    for (int i = 0; i <= 100; ++i) {
        closed.states.push_back(ex.state_at(0.01 * i));
    }
    EXPECT_LE(check_identity(closed, ex.triple()).residual, 1e-10);
}

TEST(CheckPde, DeskConvergesAtSecondOrder) {
    const auto traj = desk_trajectory();
    const auto plan = make_probe_plan(traj, 1, 1, 1e-2);
    const auto r = check_pde(traj, desk::triple(), desk::family(), plan);
    EXPECT_EQ(r.verdict, Verdict::Pass) << r.detail;
    expect_in_band(r);
    EXPECT_EQ(r.skipped, 0u);
}

TEST(CheckPde, ZeroSolutionHasZeroResidual) {
    const auto zt = stationary_triple();
    const auto family = HamiltonianFamily::constant_hermitian({ComplexMatrix::Ones(1, 1)});
    const auto traj = evolve(zt, family, {1.0, 1000});
    const auto plan = make_probe_plan(traj, 1, 2, 1e-2);
    const auto r = check_pde(traj, zt, family, plan);
    EXPECT_EQ(r.residual, 0.0);
    EXPECT_EQ(r.verdict, Verdict::Pass);
    EXPECT_FALSE(r.convergence_ratio.has_value());
}

TEST(CheckPde, ProjectorExampleAndDerivativeRelation) {
    Rng rng(101);
    const auto ex = ClosedFormExample::projectors(
        gbdt::testing::random_spread_matrix(rng, 4, 1.0),
        gbdt::testing::random_matrix(rng, 4, 2, 0.7), gbdt::testing::random_unitary(rng, 2),
        {-0.4, 0.9});
    const auto traj = evolve(ex.triple(), ex.family(), {1.0, 1000});
    const auto plan = make_probe_plan(traj, 2, 3, 1e-2);
    const auto pde = check_pde(traj, ex.triple(), ex.family(), plan);
    EXPECT_EQ(pde.verdict, Verdict::Pass) << pde.detail;
    expect_in_band(pde);
    const auto rel = check_derivative_relation(traj, ex.triple(), ex.family(), plan);
    EXPECT_EQ(rel.verdict, Verdict::Pass) << rel.detail;
    expect_in_band(rel);
}

TEST(CheckPde, WrongHamiltoniansAreCaught) {
    // Transforming with a family other than the one that drove the evolution
    // leaves an O(1) residual that does not shrink with h.
    Rng rng(102);
    const GbdtTriple t = gbdt::testing::random_triple(rng, 3, 2, 1, 1.0);
    const auto driving =
        HamiltonianFamily::constant_hermitian({gbdt::testing::random_unit_hermitian(rng, 2)});
    const auto other =
        HamiltonianFamily::constant_hermitian({gbdt::testing::random_unit_hermitian(rng, 2)});
    const auto traj = evolve(t, driving, {1.0, 1000});
    const auto plan = make_probe_plan(traj, 1, 4, 1e-2);
    EXPECT_EQ(check_pde(traj, t, driving, plan).verdict, Verdict::Pass);
    const auto r = check_pde(traj, t, other, plan);
    EXPECT_EQ(r.verdict, Verdict::Fail);
    ASSERT_TRUE(r.convergence_ratio.has_value());
    EXPECT_LT(*r.convergence_ratio, 1.5);
}

TEST(CheckConservation, DeskBothSidesVanish) {
    const auto traj = desk_trajectory();
    const auto plan = make_probe_plan(traj, 1, 5, 1e-2);
    const auto r = check_conservation(traj, desk::triple(), desk::family(), plan);
    EXPECT_EQ(r.verdict, Verdict::Pass) << r.detail;
    EXPECT_LE(r.residual, 1e-9);
    EXPECT_FALSE(r.convergence_ratio.has_value());
}

TEST(CheckConservation, RandomConstantHermitianConverges) {
    Rng rng(103);
    const GbdtTriple t = gbdt::testing::random_triple(rng, 4, 2, 2, -1.0);
    const auto family = HamiltonianFamily::constant_hermitian(
        {gbdt::testing::random_unit_hermitian(rng, 2), gbdt::testing::random_unit_hermitian(rng, 2)});
    const auto traj = evolve(t, family, {1.0, 1000});
    const auto plan = make_probe_plan(traj, 2, 6, 1e-2);
    const auto r = check_conservation(traj, t, family, plan);
    EXPECT_EQ(r.verdict, Verdict::Pass) << r.detail;
    expect_in_band(r);
}

TEST(CheckEnergyBox, DeskMatchesClosedForm) {
    const auto traj = desk_trajectory();
    const auto plan = make_probe_plan(traj, 1, 7, 1e-2);
    const BoxDomain box{{{0.0, 1.0}}, {64}};
    const auto res = check_energy_box(traj, desk::triple(), desk::family(), box,
                                      ComplexVector::Ones(1), plan);
    EXPECT_EQ(res.check.verdict, Verdict::Pass) << res.check.detail;
    expect_in_band(res.check);
    ASSERT_EQ(res.probes.size(), 5u);
    for (const auto& p : res.probes) {
        const double exact = desk::energy_rate(p.t);
        // Faces are exact up to rounding; the volume side carries the
        // trapezoid and differencing errors.
        EXPECT_NEAR(p.rhs[0], exact, 1e-9 * exact);
        EXPECT_NEAR(p.lhs[0], exact, 5e-3 * exact);
        EXPECT_LT(std::abs(p.lhs[1] - exact), std::abs(p.lhs[0] - exact));
    }
}

TEST(CheckEnergyBox, ZeroSolutionAndGridLimit) {
    const auto zt = stationary_triple();
    const auto family = HamiltonianFamily::constant_hermitian({ComplexMatrix::Ones(1, 1)});
    const auto traj = evolve(zt, family, {1.0, 1000});
    const auto plan = make_probe_plan(traj, 1, 8, 1e-2);
    const auto res = check_energy_box(traj, zt, family, BoxDomain{{{0.0, 1.0}}, {16}},
                                      ComplexVector::Ones(2), plan);
    EXPECT_EQ(res.check.residual, 0.0);
    EXPECT_EQ(res.check.verdict, Verdict::Pass);

    GbdtTriple wide = desk::triple();
    wide.shifts = {0.0, 1.0, 2.0};
    const auto sig = HamiltonianFamily::constant_signature(1, 0);
    const auto wtraj = evolve(wide, sig, {1.0, 1000});
    const auto wplan = make_probe_plan(wtraj, 3, 9, 1e-2);
    try {
        check_energy_box(wtraj, wide, sig,
                         BoxDomain{{{0, 1}, {0, 1}, {0, 1}}, {200, 200, 200}},
                         ComplexVector::Ones(1), wplan);
        FAIL() << "expected GridTooLarge";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::GridTooLarge);
    }
}

TEST(CheckEnergyBox, TwoDimensionalBoxConverges) {
    Rng rng(104);
    const GbdtTriple t = gbdt::testing::random_triple(rng, 3, 2, 2, 1.0);
    const auto family = HamiltonianFamily::constant_hermitian(
        {gbdt::testing::random_unit_hermitian(rng, 2), gbdt::testing::random_unit_hermitian(rng, 2)});
    const auto traj = evolve(t, family, {1.0, 1000});
    const auto plan = make_probe_plan(traj, 2, 10, 1e-2);
    const BoxDomain box{{{-0.5, 0.5}, {0.0, 1.0}}, {33, 33}};
    const auto res =
        check_energy_box(traj, t, family, box, gbdt::testing::random_matrix(rng, 3, 1), plan);
    EXPECT_EQ(res.check.verdict, Verdict::Pass) << res.check.detail;
    expect_in_band(res.check);
}

TEST(CheckMonotonicity, PositiveFamilies) {
    const auto traj = desk_trajectory();
    const auto r = check_monotonicity(traj, desk::triple(), desk::family());
    EXPECT_EQ(r.verdict, Verdict::Pass);
    EXPECT_NEAR(r.residual, -std::exp(-2.0), 1e-9);  // max over [0, 1] of S′ = −e^{−2t}

    Rng rng(105);
    const auto sig = ClosedFormExample::signature(
        gbdt::testing::random_spread_matrix(rng, 4, 1.0), gbdt::testing::random_matrix(rng, 4, 2),
        ComplexMatrix::Zero(4, 0), {0.2, -0.6});
    const auto straj = evolve(sig.triple(), sig.family(), {1.0, 1000});
    EXPECT_EQ(check_monotonicity(straj, sig.triple(), sig.family()).verdict, Verdict::Pass);

    const auto proj = ClosedFormExample::projectors(
        gbdt::testing::random_spread_matrix(rng, 4, -1.0), gbdt::testing::random_matrix(rng, 4, 3),
        gbdt::testing::random_unitary(rng, 3), {-1.0, 0.1, 1.2});
    const auto ptraj = evolve(proj.triple(), proj.family(), {1.0, 1000});
    EXPECT_EQ(check_monotonicity(ptraj, proj.triple(), proj.family()).verdict, Verdict::Pass);
}

TEST(CheckMonotonicity, IndefiniteFamilyIsNotApplicable) {
    Rng rng(106);
    const auto ex = ClosedFormExample::signature(
        gbdt::testing::random_spread_matrix(rng, 3, 1.0), gbdt::testing::random_matrix(rng, 3, 1),
        gbdt::testing::random_matrix(rng, 3, 1), {0.5});
    const auto traj = evolve(ex.triple(), ex.family(), {1.0, 200});
    EXPECT_EQ(check_monotonicity(traj, ex.triple(), ex.family()).verdict,
              Verdict::NotApplicable);
}

TEST(CheckMonotonicity, NegativeDefiniteStartStaysNegative) {
    Rng rng(107);
    const auto ex = ClosedFormExample::signature(
        gbdt::testing::random_spread_matrix(rng, 3, -1.0), gbdt::testing::random_matrix(rng, 3, 3),
        ComplexMatrix::Zero(3, 0), {0.0, 0.7});
    ASSERT_LT(hermitian_eigenvalues(ex.triple().s0).maxCoeff(), 0.0);
    const auto traj = evolve(ex.triple(), ex.family(), {1.0, 1000});
    const auto r = check_monotonicity(traj, ex.triple(), ex.family());
    EXPECT_EQ(r.verdict, Verdict::Pass) << r.detail;
}

TEST(CheckSpectrumAndUnitarity, SignatureExample) {
    Rng rng(108);
    const auto ex = ClosedFormExample::signature(
        gbdt::testing::random_spread_matrix(rng, 4, 1.0), gbdt::testing::random_matrix(rng, 4, 2),
        gbdt::testing::random_matrix(rng, 4, 2), {0.3, -0.9});
    const auto traj = evolve(ex.triple(), ex.family(), {1.0, 1000});
    const auto plan = make_probe_plan(traj, 2, 11, 1e-2);
    for (const auto& r : {check_unitarity(traj, ex.triple(), plan),
                          check_spectrum(traj, ex.triple(), ex.family(), plan),
                          check_hermiticity(traj, ex.triple(), ex.family(), plan),
                          check_quadratic_form(traj, ex.triple(), ex.family(), plan),
                          check_closed_form(traj, ex)}) {
        EXPECT_EQ(r.verdict, Verdict::Pass) << r.name << ": " << r.detail;
    }
}

Scenario desk_scenario() {
    Scenario s;
    const auto t = desk::triple();
    s.triple = ExplicitTriple{t.a, t.s0, t.pi0, t.shifts};
    s.family = desk::family();
    s.time = {1.0, 1000};
    s.box = BoxDomain{{{0.0, 1.0}}, {64}};
    s.h_vector = ComplexVector::Ones(1);
    return s;
}

TEST(RunSuite, DeskScenarioPasses) {
    const auto report = run_suite(desk_scenario(), "abc");
    EXPECT_TRUE(report.passed());
    EXPECT_EQ(report.scenario_digest, "abc");
    EXPECT_TRUE(report.validation_errors.empty());
    for (const char* name : {"conservation", "derivative_relation", "energy_box", "hermiticity",
                             "identity", "monotonicity", "pde", "quadratic_form", "spectrum",
                             "unitarity"}) {
        const auto* c = report.find(name);
        ASSERT_NE(c, nullptr) << name;
        EXPECT_EQ(c->verdict, Verdict::Pass) << name << ": " << c->detail;
    }
    EXPECT_EQ(report.find("closed_form"), nullptr);
    EXPECT_TRUE(std::is_sorted(report.checks.begin(), report.checks.end(),
                               [](const auto& a, const auto& b) { return a.name < b.name; }));
}

TEST(RunSuite, DuplicateShiftsReportValidationOnly) {
    Scenario s = desk_scenario();
    std::get<ExplicitTriple>(s.triple).shifts = {0.5, 0.5};
    s.family = HamiltonianFamily::constant_signature(1, 0);
    const auto report = run_suite(s);
    EXPECT_FALSE(report.passed());
    ASSERT_FALSE(report.validation_errors.empty());
    EXPECT_NE(report.validation_errors.front().find("distinct"), std::string::npos)
        << report.validation_errors.front();
    EXPECT_TRUE(report.checks.empty());
}

TEST(RunSuite, SignatureScenarioPassesWithRatios) {
    Rng rng(109);
    Scenario s;
    s.triple = SignatureExample{gbdt::testing::random_spread_matrix(rng, 4, 1.0),
                                gbdt::testing::random_matrix(rng, 4, 2, 0.7),
                                gbdt::testing::random_matrix(rng, 4, 1, 0.7), {0.25, -0.75}};
    s.time = {1.0, 1000};
    s.seed = 42;
    const auto report = run_suite(s);
    for (const auto& c : report.checks) {
        EXPECT_NE(c.verdict, Verdict::Fail) << c.name << ": " << c.detail;
    }
    EXPECT_TRUE(report.passed());
    ASSERT_NE(report.find("closed_form"), nullptr);
    ASSERT_NE(report.find("pde"), nullptr);
    EXPECT_TRUE(report.find("pde")->convergence_ratio.has_value());
    EXPECT_EQ(report.find("monotonicity")->verdict, Verdict::NotApplicable);
    EXPECT_EQ(report.find("energy_box")->verdict, Verdict::NotApplicable);
}

TEST(RunSuite, Deterministic) {
    const auto a = run_suite(desk_scenario());
    const auto b = run_suite(desk_scenario());
    ASSERT_EQ(a.checks.size(), b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        EXPECT_EQ(a.checks[i].residual, b.checks[i].residual);
        EXPECT_EQ(a.checks[i].convergence_ratio, b.checks[i].convergence_ratio);
    }
}

} // namespace
