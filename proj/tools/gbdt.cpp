#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gbdt/commands.hpp"
#include "gbdt/scenario_io.hpp"

namespace {

struct Options {
    std::string scenario;
    std::string out = ".";
    std::vector<std::string> tolerances;
    std::optional<std::uint64_t> seed;
    std::string times;
    std::string grid;
};

void add_common(CLI::App* cmd, Options& opts) {
    cmd->add_option("--scenario", opts.scenario, "Scenario file (JSON)")->required();
    cmd->add_option("--out", opts.out, "Output directory");
    cmd->add_option("--tol", opts.tolerances, "Tolerance override NAME=VALUE (repeatable)");
    cmd->add_option("--seed", opts.seed, "Seed for probe sampling");
}

gbdt::Scenario load(const Options& opts, bool validate) {
    gbdt::Scenario scenario = gbdt::io::parse_scenario(opts.scenario, validate);
    gbdt::cli::apply_tolerance_overrides(scenario.tolerances, opts.tolerances);
    if (opts.seed) {
        scenario.seed = *opts.seed;
    }
    return scenario;
}

std::vector<double> default_times(const gbdt::Scenario& scenario) {
    return {0.0, 0.5 * scenario.time.t_end, scenario.time.t_end};
}

std::size_t shift_count(const gbdt::Scenario& scenario) {
    return std::visit([](const auto& s) { return s.shifts.size(); }, scenario.triple);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Darboux-transformed Hamiltonians, explicit solutions and their checks"};
    app.set_version_flag("--version", std::string(gbdt::io::kToolVersion));
    app.require_subcommand(1);

    Options opts;
    auto* validate = app.add_subcommand("validate", "Check a scenario's triple and family");
    auto* evolve = app.add_subcommand("evolve", "Integrate Pi(t), S(t) and write the trajectory");
    auto* transform = app.add_subcommand("transform", "Transformed Hamiltonians at given times");
    auto* sample = app.add_subcommand("sample", "Sample the explicit solution on a grid");
    auto* verify = app.add_subcommand("verify", "Run every check and write a report");
    for (auto* cmd : {validate, evolve, transform, sample, verify}) {
        add_common(cmd, opts);
    }
    for (auto* cmd : {transform, sample}) {
        cmd->add_option("--t", opts.times, "Comma-separated times (default 0, t_end/2, t_end)");
    }
    sample->add_option("--grid", opts.grid,
                       "Sample grid lo:hi:count per space variable, comma-separated");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            return gbdt::cli::cmd_validate(load(opts, false), opts.out, std::cout);
        }
        if (verify->parsed()) {
            return gbdt::cli::cmd_verify(load(opts, false), opts.out, std::cout);
        }
        const gbdt::Scenario scenario = load(opts, true);
        const auto times =
            opts.times.empty() ? default_times(scenario) : gbdt::cli::parse_time_list(opts.times);
        if (evolve->parsed()) {
            return gbdt::cli::cmd_evolve(scenario, opts.out, std::cout);
        }
        if (transform->parsed()) {
            return gbdt::cli::cmd_transform(scenario, times, opts.out, std::cout);
        }
        const auto grid = gbdt::cli::parse_grid_spec(opts.grid.empty() ? "0:1:3" : opts.grid,
                                                     shift_count(scenario));
        return gbdt::cli::cmd_sample(scenario, times, grid, opts.out, std::cout);
    } catch (const gbdt::Error& e) {
        std::cerr << "error (" << gbdt::to_string(e.kind()) << "): " << e.what() << "\n";
        return gbdt::cli::kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gbdt::cli::kInvalid;
    }
}
