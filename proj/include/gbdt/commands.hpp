#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gbdt/scenario.hpp"

namespace gbdt::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kInvalid = 2 };

/// One axis of a sample grid: `count` evenly spaced points on [lo, hi].
struct AxisSpec {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 3;
};

/// Parses "lo:hi:count[,lo:hi:count...]"; a single axis is repeated r times.
std::vector<AxisSpec> parse_grid_spec(const std::string& spec, std::size_t r);

/// Parses "t1,t2,...".
std::vector<double> parse_time_list(const std::string& spec);

/// Applies "NAME=VALUE" overrides. Throws Error{InvalidArgument}.
void apply_tolerance_overrides(Tolerances& tol, const std::vector<std::string>& overrides);

/// Π(t), S(t) by RK4 from 0 with the scenario's step size.
EvolvedState evolve_to(const ResolvedScenario& resolved, const Scenario& scenario, double t);

int cmd_validate(const Scenario& scenario, const std::filesystem::path& out, std::ostream& log);
int cmd_evolve(const Scenario& scenario, const std::filesystem::path& out, std::ostream& log);
int cmd_transform(const Scenario& scenario, const std::vector<double>& times,
                  const std::filesystem::path& out, std::ostream& log);

/// Table of ψ̃ entries: t, zeta_1..zeta_r, i, j, re, im; time-major, then
/// grid in lexicographic order (last axis fastest), then component (row-major).
/// Times where S(t) is singular are omitted and counted in a trailing
/// "# omitted_rows=N" record.
int cmd_sample(const Scenario& scenario, const std::vector<double>& times,
               const std::vector<AxisSpec>& grid, const std::filesystem::path& out,
               std::ostream& log);

int cmd_verify(const Scenario& scenario, const std::filesystem::path& out, std::ostream& log);

} // namespace gbdt::cli
