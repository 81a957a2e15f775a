#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gbdt/engine.hpp"
#include "gbdt/verification.hpp"

namespace gbdt {

/// {A, S(0), Π(0), c} given directly.
struct ExplicitTriple {
    ComplexMatrix a;
    ComplexMatrix s0;
    ComplexMatrix pi0;
    std::vector<double> shifts;
};

/// Signature example: S(0) derived from θ1, θ2.
struct SignatureExample {
    ComplexMatrix a;
    ComplexMatrix theta1;
    ComplexMatrix theta2;
    std::vector<double> shifts;
};

/// Orthoprojector example: S(0) derived from Π(0) and β.
struct ProjectorExample {
    ComplexMatrix a;
    ComplexMatrix pi0;
    ComplexMatrix beta;
    std::vector<double> shifts;
};

using TripleSpec = std::variant<ExplicitTriple, SignatureExample, ProjectorExample>;

struct Scenario {
    TripleSpec triple;
    /// Required for explicit triples; implied (and must be absent) for the
    /// two example builders.
    std::optional<HamiltonianFamily> family;
    TimeGrid time;
    std::optional<BoxDomain> box;
    std::optional<ComplexVector> h_vector;
    Tolerances tolerances;
    std::uint64_t seed = 0;
};

struct ResolvedScenario {
    GbdtTriple triple;
    HamiltonianFamily family;
    std::optional<ClosedFormExample> closed_form;
};

/// Builds the triple and family, running every validation. Throws Error.
ResolvedScenario resolve(const Scenario& scenario);

/// Evolves the scenario and runs every applicable check. Validation failures
/// are reported (no checks run) rather than thrown.
VerificationReport run_suite(const Scenario& scenario, const std::string& digest = {});

} // namespace gbdt
