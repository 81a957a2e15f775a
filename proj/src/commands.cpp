#include "gbdt/commands.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "gbdt/darboux.hpp"
#include "gbdt/scenario_io.hpp"

namespace gbdt::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    std::istringstream in(text);
    while (std::getline(in, current, sep)) {
        parts.push_back(current);
    }
    return parts;
}

double to_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
        return value;
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument, "cannot read " + what + " from '" + text + "'");
    }
}

std::ostringstream table_stream() {
    std::ostringstream os;
    os << std::setprecision(17);
    return os;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
}

} // namespace

std::vector<AxisSpec> parse_grid_spec(const std::string& spec, std::size_t r) {
    std::vector<AxisSpec> axes;
    for (const auto& part : split(spec, ',')) {
        const auto fields = split(part, ':');
        if (fields.size() != 3) {
            throw Error(ErrorKind::InvalidArgument,
                        "grid axis must read lo:hi:count, got '" + part + "'");
        }
        AxisSpec axis{to_double(fields[0], "grid lo"), to_double(fields[1], "grid hi"), 0};
        const double count = to_double(fields[2], "grid count");
        if (count < 1 || count != std::floor(count)) {
            throw Error(ErrorKind::InvalidArgument, "grid count must be a positive integer");
        }
        axis.count = static_cast<std::size_t>(count);
        if (axis.count > 1 && !(axis.lo < axis.hi)) {
            throw Error(ErrorKind::InvalidArgument, "grid axis needs lo < hi");
        }
        axes.push_back(axis);
    }
    if (axes.size() == 1 && r > 1) {
        axes.assign(r, axes.front());
    }
    if (axes.size() != r) {
        throw Error(ErrorKind::Shape, "grid needs one axis per space variable (r = " +
                                          std::to_string(r) + ")");
    }
    return axes;
}

std::vector<double> parse_time_list(const std::string& spec) {
    std::vector<double> times;
    for (const auto& part : split(spec, ',')) {
        times.push_back(to_double(part, "time"));
    }
    if (times.empty()) {
        throw Error(ErrorKind::InvalidArgument, "time list is empty");
    }
    return times;
}

void apply_tolerance_overrides(Tolerances& tol, const std::vector<std::string>& overrides) {
    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::InvalidArgument, "tolerance override must read NAME=VALUE");
        }
        const std::string name = item.substr(0, eq);
        if (!tol.set(name, to_double(item.substr(eq + 1), "tolerance " + name))) {
            throw Error(ErrorKind::InvalidArgument, "unknown tolerance '" + name + "'");
        }
    }
}

EvolvedState evolve_to(const ResolvedScenario& resolved, const Scenario& scenario, double t) {
    const auto& triple = resolved.triple;
    if (t == 0.0) {
        return make_state(0.0, triple.pi0, triple.s0, triple.a);
    }
    const double dt = std::abs(scenario.time.t_end) / static_cast<double>(scenario.time.steps);
    const auto steps = static_cast<std::size_t>(std::max<long long>(1, std::llround(std::abs(t) / dt)));
    EvolveOptions options;
    options.identity_tolerance = scenario.tolerances.identity;
    const Trajectory traj = evolve(triple, resolved.family, TimeGrid{t, steps}, options);
    return t > 0.0 ? traj.states.back() : traj.states.front();
}

int cmd_validate(const Scenario& scenario, const std::filesystem::path& out, std::ostream& log) {
    io::json doc;
    doc["scenario_digest"] = io::scenario_digest(scenario);
    int code = kOk;
    try {
        const auto resolved = resolve(scenario);
        const auto validation = validate_triple(resolved.triple);
        doc["valid"] = true;
        doc["n"] = resolved.triple.n();
        doc["m"] = resolved.triple.m();
        doc["r"] = resolved.triple.r();
        doc["family"] = std::string(to_string(resolved.family.kind()));
        doc["identity_residual"] = validation.identity_residual;
        doc["s0_asymmetry"] = validation.s0 ? validation.s0->asymmetry : 0.0;
        doc["s0_condition"] = hermitian_condition(resolved.triple.s0);
        if (resolved.closed_form) {
            doc["s0_derived"] = io::matrix_to_json(resolved.triple.s0);
            doc["sylvester_residuals"] = resolved.closed_form->sylvester_residuals();
        }
        log << "valid: n=" << resolved.triple.n() << " m=" << resolved.triple.m()
            << " r=" << resolved.triple.r() << "\n";
    } catch (const Error& e) {
        doc["valid"] = false;
        doc["error_kind"] = std::string(to_string(e.kind()));
        doc["error"] = e.what();
        log << "invalid: " << e.what() << "\n";
        code = kInvalid;
    }
    ensure_dir(out);
    io::write_atomically(out / "validation.json", doc.dump(2) + "\n");
    return code;
}

int cmd_evolve(const Scenario& scenario, const std::filesystem::path& out, std::ostream& log) {
    const auto resolved = resolve(scenario);
    EvolveOptions options;
    options.identity_tolerance = scenario.tolerances.identity;
    options.singular_condition = scenario.tolerances.singular_condition;
    const Trajectory traj = evolve(resolved.triple, resolved.family, scenario.time, options);

    auto summary = table_stream();
    summary << "t,identity_residual,s_condition,near_singular\n";
    auto entries = table_stream();
    entries << "t,matrix,i,j,re,im\n";
    double worst = 0.0;
    for (const auto& state : traj.states) {
        summary << state.t << ',' << state.identity_residual << ',' << state.s_condition << ','
                << (state.s_condition >= options.singular_condition ? 1 : 0) << '\n';
        worst = std::max(worst, state.identity_residual);
        const std::pair<const char*, const ComplexMatrix*> mats[] = {{"Pi", &state.pi},
                                                                      {"S", &state.s}};
        for (const auto& [name, m] : mats) {
            for (Eigen::Index i = 0; i < m->rows(); ++i) {
                for (Eigen::Index j = 0; j < m->cols(); ++j) {
                    entries << state.t << ',' << name << ',' << i << ',' << j << ','
                            << (*m)(i, j).real() << ',' << (*m)(i, j).imag() << '\n';
                }
            }
        }
    }
    ensure_dir(out);
    io::write_atomically(out / "trajectory_summary.csv", summary.str());
    io::write_atomically(out / "trajectory.csv", entries.str());
    log << "evolved " << traj.states.size() << " states, max identity residual " << worst
        << "\n";
    return kOk;
}

int cmd_transform(const Scenario& scenario, const std::vector<double>& times,
                  const std::filesystem::path& out, std::ostream& log) {
    const auto resolved = resolve(scenario);
    const auto& triple = resolved.triple;
    DarbouxOptions options;
    options.singular_condition = scenario.tolerances.singular_condition;

    auto values = table_stream();
    values << "t,k,i,j,re,im\n";
    auto summary = table_stream();
    summary << "t,k,unitarity_defect,spectrum_defect,asymmetry\n";
    std::size_t omitted = 0;
    const Eigen::Index m = triple.m();
    for (double t : times) {
        const EvolvedState state = evolve_to(resolved, scenario, t);
        std::optional<DarbouxFrame> frame;
        try {
            frame.emplace(state, triple, options);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularS) {
                throw;
            }
            ++omitted;
            log << "skipped t=" << t << ": " << e.what() << "\n";
            continue;
        }
        const auto h_tilde = frame->transform(resolved.family);
        for (std::size_t k = 0; k < triple.r(); ++k) {
            const ComplexMatrix w = frame->transfer_at_shift(k);
            const double unitarity = (w * w.adjoint() - ComplexMatrix::Identity(m, m)).norm();
            const double spectrum_gap =
                (hermitian_eigenvalues(h_tilde[k]) -
                 hermitian_eigenvalues(resolved.family.evaluate(k, state.t)))
                    .cwiseAbs()
                    .maxCoeff();
            summary << state.t << ',' << k + 1 << ',' << unitarity << ',' << spectrum_gap << ','
                    << asymmetry(h_tilde[k]) << '\n';
            for (Eigen::Index i = 0; i < m; ++i) {
                for (Eigen::Index j = 0; j < m; ++j) {
                    values << state.t << ',' << k + 1 << ',' << i << ',' << j << ','
                           << h_tilde[k](i, j).real() << ',' << h_tilde[k](i, j).imag() << '\n';
                }
            }
        }
    }
    if (omitted > 0) {
        summary << "# omitted_times=" << omitted << '\n';
    }
    ensure_dir(out);
    io::write_atomically(out / "transformed.csv", values.str());
    io::write_atomically(out / "transform_summary.csv", summary.str());
    log << "transformed Hamiltonians at " << times.size() - omitted << " times\n";
    return kOk;
}

int cmd_sample(const Scenario& scenario, const std::vector<double>& times,
               const std::vector<AxisSpec>& grid, const std::filesystem::path& out,
               std::ostream& log) {
    const auto resolved = resolve(scenario);
    const auto& triple = resolved.triple;
    const std::size_t r = triple.r();
    if (grid.size() != r) {
        throw Error(ErrorKind::Shape, "sample grid needs one axis per space variable");
    }
    DarbouxOptions options;
    options.singular_condition = scenario.tolerances.singular_condition;

    std::vector<std::vector<double>> axis_values(r);
    std::size_t points = 1;
    for (std::size_t k = 0; k < r; ++k) {
        const auto& axis = grid[k];
        for (std::size_t i = 0; i < axis.count; ++i) {
            const double frac =
                axis.count == 1 ? 0.0
                                : static_cast<double>(i) / static_cast<double>(axis.count - 1);
            axis_values[k].push_back(i + 1 == axis.count && axis.count > 1
                                         ? axis.hi
                                         : axis.lo + frac * (axis.hi - axis.lo));
        }
        points *= axis.count;
    }

    auto table = table_stream();
    table << "t";
    for (std::size_t k = 0; k < r; ++k) {
        table << ",zeta_" << k + 1;
    }
    table << ",i,j,re,im\n";

    const std::size_t components = static_cast<std::size_t>(triple.m() * triple.n());
    std::size_t omitted = 0;
    std::size_t written = 0;
    for (double t : times) {
        const EvolvedState state = evolve_to(resolved, scenario, t);
        std::optional<DarbouxFrame> frame;
        try {
            frame.emplace(state, triple, options);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularS) {
                throw;
            }
            omitted += points * components;
            continue;
        }
        std::vector<std::size_t> index(r, 0);
        std::vector<double> zeta(r);
        for (std::size_t p = 0; p < points; ++p) {
            // Last axis varies fastest.
            std::size_t rest = p;
            for (std::size_t k = r; k-- > 0;) {
                index[k] = rest % grid[k].count;
                rest /= grid[k].count;
                zeta[k] = axis_values[k][index[k]];
            }
            const ComplexMatrix psi = frame->psi(zeta);
            for (Eigen::Index i = 0; i < psi.rows(); ++i) {
                for (Eigen::Index j = 0; j < psi.cols(); ++j) {
                    table << state.t;
                    for (double z : zeta) {
                        table << ',' << z;
                    }
                    table << ',' << i << ',' << j << ',' << psi(i, j).real() << ','
                          << psi(i, j).imag() << '\n';
                    ++written;
                }
            }
        }
    }
    table << "# omitted_rows=" << omitted << '\n';
    ensure_dir(out);
    io::write_atomically(out / "samples.csv", table.str());
    log << "wrote " << written << " sample rows (" << omitted << " omitted)\n";
    return kOk;
}

int cmd_verify(const Scenario& scenario, const std::filesystem::path& out, std::ostream& log) {
    const VerificationReport report = run_suite(scenario, io::scenario_digest(scenario));
    ensure_dir(out);
    io::write_atomically(out / "report.json", io::report_to_json(report).dump(2) + "\n");
    for (const auto& err : report.validation_errors) {
        log << "validation: " << err << "\n";
    }
    for (const auto& c : report.checks) {
        log << std::left << std::setw(20) << c.name << ' ' << std::setw(5) << to_string(c.verdict)
            << " residual=" << c.residual << " tol=" << c.tolerance;
        if (c.convergence_ratio) {
            log << " ratio=" << *c.convergence_ratio;
        }
        log << "\n";
    }
    log << (report.passed() ? "PASS" : "FAIL") << "\n";
    if (!report.validation_errors.empty()) {
        return kInvalid;
    }
    return report.passed() ? kOk : kFailed;
}

} // namespace gbdt::cli
