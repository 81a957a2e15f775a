#include "gbdt/scenario_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gbdt::io {

namespace {

[[noreturn]] void parse_fail(const std::string& field, const std::string& message) {
    throw Error(ErrorKind::Parse, "field '" + field + "': " + message);
}

const json& require_key(const json& obj, const char* key, const std::string& context) {
    if (!obj.is_object()) {
        parse_fail(context, "expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        parse_fail(context.empty() ? key : context + "." + key, "missing");
    }
    return *it;
}

std::string join(const std::string& context, const char* key) {
    return context.empty() ? key : context + "." + key;
}

Complex entry_from_json(const json& value, const std::string& field) {
    if (value.is_number()) {
        return {value.get<double>(), 0.0};
    }
    if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
        return {value[0].get<double>(), value[1].get<double>()};
    }
    parse_fail(field, "expected a number or a [re, im] pair");
}

json entry_to_json(Complex z) {
    return json::array({z.real(), z.imag()});
}

double number_from_json(const json& value, const std::string& field) {
    if (!value.is_number()) {
        parse_fail(field, "expected a number");
    }
    return value.get<double>();
}

std::vector<double> reals_from_json(const json& value, const std::string& field) {
    if (!value.is_array()) {
        parse_fail(field, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < value.size(); ++i) {
        out.push_back(number_from_json(value[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

ComplexVector vector_from_json(const json& value, const std::string& field) {
    if (!value.is_array() || value.empty()) {
        parse_fail(field, "expected a non-empty array of entries");
    }
    ComplexVector v(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) =
            entry_from_json(value[i], field + "[" + std::to_string(i) + "]");
    }
    return v;
}

std::vector<ComplexMatrix> matrices_from_json(const json& value, const std::string& field) {
    if (!value.is_array() || value.empty()) {
        parse_fail(field, "expected a non-empty array of matrices");
    }
    std::vector<ComplexMatrix> out;
    for (std::size_t i = 0; i < value.size(); ++i) {
        out.push_back(matrix_from_json(value[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

HamiltonianFamily family_from_json(const json& value, const std::string& field) {
    const auto kind = require_key(value, "kind", field);
    if (!kind.is_string()) {
        parse_fail(join(field, "kind"), "expected a string");
    }
    const auto name = kind.get<std::string>();
    if (name == "ConstantSignature") {
        const auto m1 = require_key(value, "m1", field);
        const auto m2 = require_key(value, "m2", field);
        if (!m1.is_number_integer() || !m2.is_number_integer()) {
            parse_fail(field, "m1 and m2 must be integers");
        }
        return HamiltonianFamily::constant_signature(m1.get<Eigen::Index>(),
                                                     m2.get<Eigen::Index>());
    }
    if (name == "OrthoProjectors") {
        return HamiltonianFamily::ortho_projectors(
            matrix_from_json(require_key(value, "beta", field), join(field, "beta")));
    }
    if (name == "ConstantHermitian") {
        return HamiltonianFamily::constant_hermitian(
            matrices_from_json(require_key(value, "H", field), join(field, "H")));
    }
    if (name == "PolynomialHermitian") {
        const auto& coeffs = require_key(value, "coefficients", field);
        const std::string cfield = join(field, "coefficients");
        if (!coeffs.is_array() || coeffs.empty()) {
            parse_fail(cfield, "expected one coefficient list per Hamiltonian");
        }
        std::vector<std::vector<ComplexMatrix>> polys;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            polys.push_back(matrices_from_json(coeffs[k], cfield + "[" + std::to_string(k) + "]"));
        }
        return HamiltonianFamily::polynomial_hermitian(std::move(polys));
    }
    parse_fail(join(field, "kind"), "unknown family '" + name + "'");
}

json family_to_json(const HamiltonianFamily& family) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ConstantSignature>) {
                return {{"kind", "ConstantSignature"}, {"m1", p.m1}, {"m2", p.m2}};
            } else if constexpr (std::is_same_v<T, OrthoProjectors>) {
                return {{"kind", "OrthoProjectors"}, {"beta", matrix_to_json(p.beta)}};
            } else if constexpr (std::is_same_v<T, ConstantHermitian>) {
                json hs = json::array();
                for (const auto& h : p.h) {
                    hs.push_back(matrix_to_json(h));
                }
                return {{"kind", "ConstantHermitian"}, {"H", hs}};
            } else {
                json polys = json::array();
                for (const auto& poly : p.coefficients) {
                    json coeffs = json::array();
                    for (const auto& c : poly) {
                        coeffs.push_back(matrix_to_json(c));
                    }
                    polys.push_back(coeffs);
                }
                return {{"kind", "PolynomialHermitian"}, {"coefficients", polys}};
            }
        },
        family.payload());
}

TripleSpec triple_from_json(const json& value) {
    const std::string field = "triple";
    const auto& kind = require_key(value, "kind", field);
    if (!kind.is_string()) {
        parse_fail("triple.kind", "expected a string");
    }
    const auto name = kind.get<std::string>();
    auto matrix = [&](const char* key) {
        return matrix_from_json(require_key(value, key, field), join(field, key));
    };
    auto shifts = reals_from_json(require_key(value, "c", field), "triple.c");
    if (name == "explicit") {
        return ExplicitTriple{matrix("A"), matrix("S0"), matrix("Pi0"), std::move(shifts)};
    }
    if (name == "example1") {
        ComplexMatrix a = matrix("A");
        ComplexMatrix theta1 = matrix("theta1");
        ComplexMatrix theta2 = value.contains("theta2") ? matrix("theta2")
                                                        : ComplexMatrix(a.rows(), 0);
        return SignatureExample{std::move(a), std::move(theta1), std::move(theta2),
                                std::move(shifts)};
    }
    if (name == "example2") {
        return ProjectorExample{matrix("A"), matrix("Pi0"), matrix("beta"), std::move(shifts)};
    }
    parse_fail("triple.kind", "expected explicit, example1 or example2, got '" + name + "'");
}

json triple_to_json(const TripleSpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ExplicitTriple>) {
                return {{"kind", "explicit"},
                        {"A", matrix_to_json(s.a)},
                        {"S0", matrix_to_json(s.s0)},
                        {"Pi0", matrix_to_json(s.pi0)},
                        {"c", s.shifts}};
            } else if constexpr (std::is_same_v<T, SignatureExample>) {
                return {{"kind", "example1"},
                        {"A", matrix_to_json(s.a)},
                        {"theta1", matrix_to_json(s.theta1)},
                        {"theta2", matrix_to_json(s.theta2)},
                        {"c", s.shifts}};
            } else {
                return {{"kind", "example2"},
                        {"A", matrix_to_json(s.a)},
                        {"Pi0", matrix_to_json(s.pi0)},
                        {"beta", matrix_to_json(s.beta)},
                        {"c", s.shifts}};
            }
        },
        spec);
}

std::size_t triple_r(const TripleSpec& spec) {
    return std::visit([](const auto& s) { return s.shifts.size(); }, spec);
}

} // namespace

ComplexMatrix matrix_from_json(const json& value, const std::string& field) {
    if (!value.is_array() || value.empty()) {
        parse_fail(field, "expected a non-empty list of rows");
    }
    const std::size_t rows = value.size();
    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!value[i].is_array()) {
            parse_fail(field + "[" + std::to_string(i) + "]", "expected a row (array)");
        }
        if (i == 0) {
            cols = value[i].size();
        } else if (value[i].size() != cols) {
            parse_fail(field, "rows have different lengths");
        }
    }
    ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const Complex z = entry_from_json(
                value[i][j], field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                parse_fail(field, "non-finite entry");
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z;
        }
    }
    return m;
}

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(entry_to_json(m(i, j)));
        }
        rows.push_back(row);
    }
    return rows;
}

Scenario scenario_from_json(const json& doc) {
    if (!doc.is_object()) {
        parse_fail("<root>", "expected an object");
    }
    Scenario sc;
    sc.triple = triple_from_json(require_key(doc, "triple", ""));
    if (doc.contains("family")) {
        sc.family = family_from_json(doc.at("family"), "family");
    }

    const auto& time = require_key(doc, "time", "");
    sc.time.t_end = number_from_json(require_key(time, "t_end", "time"), "time.t_end");
    const auto& steps = require_key(time, "steps", "time");
    if (!steps.is_number_integer() || steps.get<long long>() < 1) {
        parse_fail("time.steps", "expected a positive integer");
    }
    sc.time.steps = steps.get<std::size_t>();

    if (doc.contains("box")) {
        const auto& box = doc.at("box");
        const auto& bounds = require_key(box, "bounds", "box");
        const auto& grid = require_key(box, "grid", "box");
        if (!bounds.is_array() || !grid.is_array()) {
            parse_fail("box", "bounds and grid must be arrays");
        }
        BoxDomain domain;
        for (std::size_t k = 0; k < bounds.size(); ++k) {
            const auto pair = reals_from_json(bounds[k], "box.bounds[" + std::to_string(k) + "]");
            if (pair.size() != 2) {
                parse_fail("box.bounds", "each bound must be an [a, b] pair");
            }
            domain.bounds.emplace_back(pair[0], pair[1]);
        }
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (!grid[k].is_number_integer() || grid[k].get<long long>() < 2) {
                parse_fail("box.grid", "grid counts must be integers >= 2");
            }
            domain.grid.push_back(grid[k].get<std::size_t>());
        }
        domain.validate(triple_r(sc.triple));
        sc.box = std::move(domain);
    }
    if (doc.contains("h_vector")) {
        sc.h_vector = vector_from_json(doc.at("h_vector"), "h_vector");
    }
    if (doc.contains("tolerances")) {
        const auto& tols = doc.at("tolerances");
        if (!tols.is_object()) {
            parse_fail("tolerances", "expected an object");
        }
        for (const auto& [key, value] : tols.items()) {
            if (!sc.tolerances.set(key, number_from_json(value, "tolerances." + key))) {
                parse_fail("tolerances." + key, "unknown tolerance");
            }
        }
    }
    if (doc.contains("seed")) {
        const auto& seed = doc.at("seed");
        if (!seed.is_number_unsigned()) {
            parse_fail("seed", "expected a non-negative integer");
        }
        sc.seed = seed.get<std::uint64_t>();
    }
    return sc;
}

json scenario_to_json(const Scenario& scenario) {
    json doc;
    doc["triple"] = triple_to_json(scenario.triple);
    if (scenario.family) {
        doc["family"] = family_to_json(*scenario.family);
    }
    doc["time"] = {{"t_end", scenario.time.t_end}, {"steps", scenario.time.steps}};
    if (scenario.box) {
        json bounds = json::array();
        for (const auto& [a, b] : scenario.box->bounds) {
            bounds.push_back(json::array({a, b}));
        }
        doc["box"] = {{"bounds", bounds}, {"grid", scenario.box->grid}};
    }
    if (scenario.h_vector) {
        json h = json::array();
        for (Eigen::Index i = 0; i < scenario.h_vector->size(); ++i) {
            h.push_back(entry_to_json((*scenario.h_vector)(i)));
        }
        doc["h_vector"] = h;
    }
    json tols = json::object();
    for (const auto& [name, value] : scenario.tolerances.entries()) {
        tols[name] = value;
    }
    doc["tolerances"] = tols;
    doc["seed"] = scenario.seed;
    return doc;
}

Scenario parse_scenario(const std::filesystem::path& path, bool validate) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Parse, "cannot open scenario file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    Scenario sc;
    try {
        sc = scenario_from_json(doc);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    if (validate) {
        resolve(sc);
    }
    if (sc.h_vector) {
        const auto n = std::visit([](const auto& s) { return s.a.rows(); }, sc.triple);
        if (sc.h_vector->size() != n) {
            throw Error(ErrorKind::Shape, "h_vector must have n entries");
        }
    }
    return sc;
}

std::string scenario_digest(const Scenario& scenario) {
    const std::string canonical = scenario_to_json(scenario).dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

json report_to_json(const VerificationReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"name", c.name},
                          {"residual", c.residual},
                          {"tolerance", c.tolerance},
                          {"convergence_ratio", c.convergence_ratio
                                                    ? json(*c.convergence_ratio)
                                                    : json(nullptr)},
                          {"verdict", std::string(to_string(c.verdict))},
                          {"skipped", c.skipped},
                          {"detail", c.detail}});
    }
    return {{"tool", kToolName},
            {"version", kToolVersion},
            {"scenario_digest", report.scenario_digest},
            {"passed", report.passed()},
            {"validation_errors", report.validation_errors},
            {"checks", checks}};
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
        }
        out << contents;
        if (!out.flush()) {
            throw Error(ErrorKind::InvalidArgument, "failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace gbdt::io
