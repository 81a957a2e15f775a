#include "gbdt/verification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace gbdt {

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "n/a";
    }
    return "unknown";
}

bool VerificationReport::passed() const {
    if (!validation_errors.empty()) {
        return false;
    }
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.verdict == Verdict::Fail; });
}

const CheckResult* VerificationReport::find(std::string_view name) const {
    for (const auto& c : checks) {
        if (c.name == name) {
            return &c;
        }
    }
    return nullptr;
}

namespace {

using TolField = double Tolerances::*;

const std::vector<std::pair<std::string, TolField>>& tolerance_fields() {
    static const std::vector<std::pair<std::string, TolField>> fields = {
        {"band_high", &Tolerances::band_high},
        {"band_low", &Tolerances::band_low},
        {"closed_form", &Tolerances::closed_form},
        {"energy", &Tolerances::energy},
        {"fd_residual", &Tolerances::fd_residual},
        {"fd_step", &Tolerances::fd_step},
        {"hermitian", &Tolerances::hermitian},
        {"identity", &Tolerances::identity},
        {"monotonicity", &Tolerances::monotonicity},
        {"quadratic_form", &Tolerances::quadratic_form},
        {"singular_condition", &Tolerances::singular_condition},
        {"spectrum", &Tolerances::spectrum},
        {"unitarity", &Tolerances::unitarity},
        {"unitarity_condition", &Tolerances::unitarity_condition},
    };
    return fields;
}

} // namespace

bool Tolerances::set(std::string_view name, double value) {
    for (const auto& [key, field] : tolerance_fields()) {
        if (key == name) {
            this->*field = value;
            return true;
        }
    }
    return false;
}

std::vector<std::pair<std::string, double>> Tolerances::entries() const {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [key, field] : tolerance_fields()) {
        out.emplace_back(key, this->*field);
    }
    return out;
}

void BoxDomain::validate(std::size_t r) const {
    if (bounds.size() != r || grid.size() != r) {
        std::ostringstream os;
        os << "box needs one (a_k, b_k) pair and one grid count per space variable (r = " << r
           << ")";
        throw Error(ErrorKind::Shape, os.str());
    }
    for (std::size_t k = 0; k < r; ++k) {
        const auto [a, b] = bounds[k];
        if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
            throw Error(ErrorKind::InvalidArgument, "box bounds must be finite with a_k < b_k");
        }
        if (grid[k] < 2) {
            throw Error(ErrorKind::InvalidArgument, "box grid counts must be at least 2");
        }
    }
}

BoxDomain BoxDomain::refined() const {
    BoxDomain out = *this;
    for (auto& count : out.grid) {
        count = 2 * count - 1;
    }
    return out;
}

std::size_t BoxDomain::point_count() const {
    std::size_t total = 1;
    for (std::size_t count : grid) {
        total *= count;
    }
    return total;
}

ProbePlan make_probe_plan(const Trajectory& trajectory, std::size_t r, std::uint64_t seed,
                          double fd_step, std::size_t time_count, std::size_t point_count) {
    if (trajectory.states.size() < 3 || trajectory.step <= 0.0) {
        throw Error(ErrorKind::InvalidArgument,
                    "central differences need a trajectory with at least 3 states");
    }
    ProbePlan plan;
    auto coarse = static_cast<std::size_t>(std::llround(fd_step / trajectory.step));
    coarse = std::max<std::size_t>(coarse, 2);
    coarse += coarse % 2;
    plan.coarse_offset = coarse;
    plan.fine_offset = coarse / 2;

    const std::size_t last = trajectory.states.size() - 1;
    if (last < 2 * coarse) {
        // Too short for the requested step: fall back to the widest pair that fits.
        if (last < 4) {
            plan.coarse_offset = 1;
            plan.fine_offset = 1;
        } else {
            plan.coarse_offset = 2 * (last / 4);
            plan.fine_offset = plan.coarse_offset / 2;
        }
    }
    const std::size_t lo = plan.coarse_offset;
    const std::size_t hi = last - plan.coarse_offset;
    if (time_count <= 1 || hi == lo) {
        plan.time_indices.push_back(lo + (hi - lo) / 2);
    } else {
        for (std::size_t j = 0; j < time_count; ++j) {
            const double frac = static_cast<double>(j) / static_cast<double>(time_count - 1);
            const auto idx = lo + static_cast<std::size_t>(
                                      std::llround(frac * static_cast<double>(hi - lo)));
            if (plan.time_indices.empty() || plan.time_indices.back() != idx) {
                plan.time_indices.push_back(idx);
            }
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (std::size_t p = 0; p < point_count; ++p) {
        std::vector<double> zeta(r);
        for (auto& z : zeta) {
            z = coord(rng);
        }
        plan.zetas.push_back(std::move(zeta));
    }
    return plan;
}

namespace {

// Aggregated residuals whose sum falls below this fraction of the differenced
// quantity are indistinguishable from rounding; no order can be read off them.
constexpr double kConvergenceFloor = 1e-9;

struct FrameEntry {
    DarbouxFrame frame;
    const EvolvedState* state;
    std::vector<ComplexMatrix> h_tilde;
    std::vector<ComplexMatrix> h;
};

class FrameCache {
public:
    FrameCache(const Trajectory& trajectory, const GbdtTriple& triple,
               const HamiltonianFamily* family, const Tolerances& tol)
        : trajectory_(trajectory), triple_(triple), family_(family) {
        options_.singular_condition = tol.singular_condition;
    }

    const FrameEntry* get(std::size_t index) {
        auto it = entries_.find(index);
        if (it != entries_.end()) {
            return it->second ? &*it->second : nullptr;
        }
        std::optional<FrameEntry> entry;
        try {
            const auto& state = trajectory_.states.at(index);
            DarbouxFrame frame(state, triple_, options_);
            std::vector<ComplexMatrix> h_tilde;
            std::vector<ComplexMatrix> h;
            if (family_ != nullptr) {
                h_tilde = frame.transform(*family_);
                h = family_->evaluate_all(state.t, triple_.r());
            }
            entry.emplace(FrameEntry{std::move(frame), &state, std::move(h_tilde), std::move(h)});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularS) {
                throw;
            }
        }
        auto [pos, _] = entries_.emplace(index, std::move(entry));
        return pos->second ? &*pos->second : nullptr;
    }

    const Trajectory& trajectory() const { return trajectory_; }

private:
    const Trajectory& trajectory_;
    const GbdtTriple& triple_;
    const HamiltonianFamily* family_;
    DarbouxOptions options_;
    std::map<std::size_t, std::optional<FrameEntry>> entries_;
};

struct FdAccumulator {
    double coarse_sum = 0.0;
    double fine_sum = 0.0;
    double scale_sum = 0.0;
    double max_relative = 0.0;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

CheckResult finish_fd(std::string name, const FdAccumulator& acc, double tolerance,
                      const Tolerances& tol) {
    CheckResult out;
    out.name = std::move(name);
    out.tolerance = tolerance;
    out.skipped = acc.skipped;
    out.residual = acc.max_relative;
    std::ostringstream os;
    os << "probes=" << acc.evaluated << " coarse_sum=" << acc.coarse_sum
       << " fine_sum=" << acc.fine_sum;
    if (acc.evaluated == 0) {
        out.verdict = Verdict::Fail;
        os << "; no probe could be evaluated";
        out.detail = os.str();
        return out;
    }
    const bool within = acc.max_relative <= tolerance;
    if (acc.coarse_sum <= kConvergenceFloor * (1.0 + acc.scale_sum)) {
        os << "; residual at rounding level, order not measurable";
        out.verdict = within ? Verdict::Pass : Verdict::Fail;
    } else {
        const double ratio = acc.fine_sum > 0.0 ? acc.coarse_sum / acc.fine_sum
                                                : std::numeric_limits<double>::infinity();
        out.convergence_ratio = ratio;
        const bool in_band = ratio >= tol.band_low && ratio <= tol.band_high;
        if (!in_band) {
            os << "; ratio outside [" << tol.band_low << ", " << tol.band_high << "]";
        }
        out.verdict = within && in_band ? Verdict::Pass : Verdict::Fail;
    }
    out.detail = os.str();
    return out;
}

// Shared driver for the three central-difference checks. `quantity` is the
// differenced matrix at an index, `target` the analytic derivative at the
// centre index; both may depend on the spatial probe.
using Quantity = std::function<ComplexMatrix(const FrameEntry&, std::size_t zeta_index)>;

FdAccumulator run_central_differences(FrameCache& cache, const ProbePlan& plan,
                                      std::size_t zeta_count, const Quantity& quantity,
                                      const Quantity& target) {
    FdAccumulator acc;
    const auto& states = cache.trajectory().states;
    for (std::size_t centre : plan.time_indices) {
        const std::size_t offsets[2] = {plan.coarse_offset, plan.fine_offset};
        const FrameEntry* mid = cache.get(centre);
        const FrameEntry* lo[2] = {cache.get(centre - offsets[0]), cache.get(centre - offsets[1])};
        const FrameEntry* hi[2] = {cache.get(centre + offsets[0]), cache.get(centre + offsets[1])};
        if (!mid || !lo[0] || !lo[1] || !hi[0] || !hi[1]) {
            acc.skipped += zeta_count;
            continue;
        }
        for (std::size_t z = 0; z < zeta_count; ++z) {
            const ComplexMatrix expected = target(*mid, z);
            double residual[2];
            double delta_norm = 0.0;
            for (int level = 0; level < 2; ++level) {
                const double span = states[centre + offsets[level]].t -
                                    states[centre - offsets[level]].t;
                const ComplexMatrix delta =
                    (quantity(*hi[level], z) - quantity(*lo[level], z)) / span;
                residual[level] = (delta - expected).norm();
                if (level == 0) {
                    delta_norm = delta.norm();
                }
            }
            acc.coarse_sum += residual[0];
            acc.fine_sum += residual[1];
            acc.scale_sum += delta_norm;
            acc.max_relative = std::max(acc.max_relative, residual[0] / (1.0 + delta_norm));
            ++acc.evaluated;
        }
    }
    return acc;
}

} // namespace

CheckResult check_identity(const Trajectory& trajectory, const GbdtTriple& triple,
                           const Tolerances& tol) {
    CheckResult out;
    out.name = "identity";
    out.tolerance = tol.identity * identity_scale(triple);
    double worst_t = 0.0;
    for (const auto& state : trajectory.states) {
        const double res = identity_residual(triple.a, state.s, state.pi);
        if (res > out.residual) {
            out.residual = res;
            worst_t = state.t;
        }
    }
    out.verdict = out.residual <= out.tolerance ? Verdict::Pass : Verdict::Fail;
    std::ostringstream os;
    os << "states=" << trajectory.states.size() << " worst_t=" << worst_t;
    out.detail = os.str();
    return out;
}

CheckResult check_hermiticity(const Trajectory& trajectory, const GbdtTriple& triple,
                              const HamiltonianFamily& family, const ProbePlan& plan,
                              const Tolerances& tol) {
    CheckResult out;
    out.name = "hermiticity";
    out.tolerance = tol.hermitian;
    for (const auto& state : trajectory.states) {
        out.residual = std::max(out.residual, asymmetry(state.s));
    }
    FrameCache cache(trajectory, triple, &family, tol);
    std::size_t evaluated = 0;
    for (std::size_t idx : plan.time_indices) {
        const FrameEntry* entry = cache.get(idx);
        if (!entry) {
            ++out.skipped;
            continue;
        }
        ++evaluated;
        for (const auto& ht : entry->h_tilde) {
            out.residual = std::max(out.residual, asymmetry(ht));
        }
    }
    out.verdict = out.residual <= out.tolerance ? Verdict::Pass : Verdict::Fail;
    out.detail = "S(t) at all states, transformed Hamiltonians at " +
                 std::to_string(evaluated) + " probe times";
    return out;
}

CheckResult check_unitarity(const Trajectory& trajectory, const GbdtTriple& triple,
                            const ProbePlan& plan, const Tolerances& tol) {
    CheckResult out;
    out.name = "unitarity";
    out.tolerance = tol.unitarity;
    FrameCache cache(trajectory, triple, nullptr, tol);
    std::size_t evaluated = 0;
    const Eigen::Index m = triple.m();
    for (std::size_t idx : plan.time_indices) {
        const auto& state = trajectory.states[idx];
        const FrameEntry* entry =
            state.s_condition < tol.unitarity_condition ? cache.get(idx) : nullptr;
        if (!entry) {
            ++out.skipped;
            continue;
        }
        ++evaluated;
        for (std::size_t k = 0; k < triple.r(); ++k) {
            const ComplexMatrix w = entry->frame.transfer_at_shift(k);
            out.residual = std::max(
                out.residual, (w * w.adjoint() - ComplexMatrix::Identity(m, m)).norm());
        }
    }
    out.verdict = evaluated > 0 && out.residual <= out.tolerance ? Verdict::Pass : Verdict::Fail;
    out.detail = "probe times evaluated=" + std::to_string(evaluated);
    return out;
}

CheckResult check_spectrum(const Trajectory& trajectory, const GbdtTriple& triple,
                           const HamiltonianFamily& family, const ProbePlan& plan,
                           const Tolerances& tol) {
    CheckResult out;
    out.name = "spectrum";
    out.tolerance = tol.spectrum;
    FrameCache cache(trajectory, triple, &family, tol);
    std::size_t evaluated = 0;
    for (std::size_t idx : plan.time_indices) {
        const FrameEntry* entry = cache.get(idx);
        if (!entry) {
            ++out.skipped;
            continue;
        }
        ++evaluated;
        for (std::size_t k = 0; k < triple.r(); ++k) {
            const Eigen::VectorXd transformed = hermitian_eigenvalues(entry->h_tilde[k]);
            const Eigen::VectorXd original = hermitian_eigenvalues(entry->h[k]);
            out.residual =
                std::max(out.residual, (transformed - original).cwiseAbs().maxCoeff());
        }
    }
    out.verdict = evaluated > 0 && out.residual <= out.tolerance ? Verdict::Pass : Verdict::Fail;
    out.detail = "probe times evaluated=" + std::to_string(evaluated);
    return out;
}

CheckResult check_pde(const Trajectory& trajectory, const GbdtTriple& triple,
                      const HamiltonianFamily& family, const ProbePlan& plan,
                      const Tolerances& tol) {
    FrameCache cache(trajectory, triple, &family, tol);
    // exp{iΣζ_k R_k} does not depend on t.
    std::vector<ComplexMatrix> exponentials;
    for (const auto& zeta : plan.zetas) {
        ComplexMatrix exponent = ComplexMatrix::Zero(triple.n(), triple.n());
        for (std::size_t k = 0; k < triple.r(); ++k) {
            exponent += (kI * zeta[k]) * resolvent(triple.a, triple.shifts[k]);
        }
        exponentials.push_back(expm(exponent));
    }
    const Quantity psi = [&](const FrameEntry& e, std::size_t z) {
        return e.frame.psi_from_exponential(exponentials[z]);
    };
    const Quantity flux = [&](const FrameEntry& e, std::size_t z) {
        ComplexMatrix total = ComplexMatrix::Zero(triple.m(), triple.n());
        for (std::size_t k = 0; k < triple.r(); ++k) {
            total += e.h_tilde[k] * e.frame.pi_star_s_inv() * (kI * e.frame.resolvents()[k]) *
                     exponentials[z];
        }
        return total;
    };
    const auto acc = run_central_differences(cache, plan, plan.zetas.size(), psi, flux);
    return finish_fd("pde", acc, tol.fd_residual, tol);
}

CheckResult check_derivative_relation(const Trajectory& trajectory, const GbdtTriple& triple,
                                      const HamiltonianFamily& family, const ProbePlan& plan,
                                      const Tolerances& tol) {
    FrameCache cache(trajectory, triple, &family, tol);
    const Quantity value = [](const FrameEntry& e, std::size_t) {
        return e.frame.pi_star_s_inv();
    };
    const Quantity target = [&](const FrameEntry& e, std::size_t) {
        ComplexMatrix total = ComplexMatrix::Zero(triple.m(), triple.n());
        for (std::size_t k = 0; k < triple.r(); ++k) {
            total += kI * e.h_tilde[k] * e.frame.pi_star_s_inv() * e.frame.resolvents()[k];
        }
        return total;
    };
    const auto acc = run_central_differences(cache, plan, 1, value, target);
    return finish_fd("derivative_relation", acc, tol.fd_residual, tol);
}

CheckResult check_conservation(const Trajectory& trajectory, const GbdtTriple& triple,
                               const HamiltonianFamily& family, const ProbePlan& plan,
                               const Tolerances& tol) {
    FrameCache cache(trajectory, triple, &family, tol);
    const Quantity value = [](const FrameEntry& e, std::size_t) -> ComplexMatrix {
        return e.frame.pi_star_s_inv() * e.state->pi;
    };
    const Quantity target = [&](const FrameEntry& e, std::size_t) {
        ComplexMatrix total = ComplexMatrix::Zero(triple.m(), triple.m());
        for (std::size_t k = 0; k < triple.r(); ++k) {
            total += e.h_tilde[k] - e.h[k];
        }
        return total;
    };
    const auto acc = run_central_differences(cache, plan, 1, value, target);
    return finish_fd("conservation", acc, tol.fd_residual, tol);
}

namespace {

struct GridIntegrals {
    double volume = 0.0;  // ∫_V |ψ̃h|²
    double flux = 0.0;    // Σ_k faces of (ψ̃h)*H̃_k(ψ̃h)
};

struct AxisData {
    std::vector<double> weights;
    std::vector<ComplexMatrix> exponentials;  // exp{iζ R_k} per grid value
};

std::vector<AxisData> prepare_axes(const BoxDomain& box, const std::vector<ComplexMatrix>& rs) {
    std::vector<AxisData> axes(box.grid.size());
    for (std::size_t k = 0; k < box.grid.size(); ++k) {
        const auto [a, b] = box.bounds[k];
        const std::size_t count = box.grid[k];
        const double spacing = (b - a) / static_cast<double>(count - 1);
        auto& axis = axes[k];
        axis.weights.assign(count, spacing);
        axis.weights.front() *= 0.5;
        axis.weights.back() *= 0.5;
        for (std::size_t i = 0; i < count; ++i) {
            const double zeta = i + 1 == count ? b : a + spacing * static_cast<double>(i);
            axis.exponentials.push_back(expm((kI * zeta) * rs[k]));
        }
    }
    return axes;
}

GridIntegrals integrate_grid(const ComplexMatrix& pi_star_s_inv,
                             const std::vector<ComplexMatrix>* h_tilde,
                             const std::vector<AxisData>& axes, const ComplexVector& h) {
    GridIntegrals out;
    const std::size_t r = axes.size();
    std::vector<std::size_t> index(r, 0);
    std::vector<ComplexVector> partial(r + 1);
    partial[0] = h;

    // Depth-first over the tensor grid; partial[d] = Π_{j<d} E_j(ζ_j) h.
    std::function<void(std::size_t)> visit = [&](std::size_t depth) {
        if (depth == r) {
            const ComplexVector v = pi_star_s_inv * partial[r];
            double full_weight = 1.0;
            for (std::size_t j = 0; j < r; ++j) {
                full_weight *= axes[j].weights[index[j]];
            }
            out.volume += full_weight * v.squaredNorm();
            if (h_tilde == nullptr) {
                return;
            }
            for (std::size_t k = 0; k < r; ++k) {
                const bool low = index[k] == 0;
                const bool high = index[k] + 1 == axes[k].weights.size();
                if (!low && !high) {
                    continue;
                }
                double face_weight = 1.0;
                for (std::size_t j = 0; j < r; ++j) {
                    if (j != k) {
                        face_weight *= axes[j].weights[index[j]];
                    }
                }
                const double density = (v.adjoint() * (*h_tilde)[k] * v)(0, 0).real();
                if (high) {
                    out.flux += face_weight * density;
                }
                if (low) {
                    out.flux -= face_weight * density;
                }
            }
            return;
        }
        for (std::size_t i = 0; i < axes[depth].weights.size(); ++i) {
            index[depth] = i;
            partial[depth + 1] = axes[depth].exponentials[i] * partial[depth];
            visit(depth + 1);
        }
    };
    visit(0);
    return out;
}

constexpr std::size_t kMaxGridPoints = 1'000'000;

} // namespace

EnergyBoxResult check_energy_box(const Trajectory& trajectory, const GbdtTriple& triple,
                                 const HamiltonianFamily& family, const BoxDomain& box,
                                 const ComplexVector& h, const ProbePlan& plan,
                                 const Tolerances& tol) {
    box.validate(triple.r());
    if (h.size() != triple.n()) {
        throw Error(ErrorKind::Shape, "energy vector h must have n entries");
    }
    const BoxDomain boxes[2] = {box, box.refined()};
    if (boxes[1].point_count() > kMaxGridPoints) {
        std::ostringstream os;
        os << "refined energy grid has " << boxes[1].point_count() << " points (limit "
           << kMaxGridPoints << ")";
        throw Error(ErrorKind::GridTooLarge, os.str());
    }

    FrameCache cache(trajectory, triple, &family, tol);
    std::vector<ComplexMatrix> rs;
    for (double c : triple.shifts) {
        rs.push_back(resolvent(triple.a, c));
    }
    const std::vector<AxisData> axes[2] = {prepare_axes(boxes[0], rs),
                                           prepare_axes(boxes[1], rs)};
    const std::size_t offsets[2] = {plan.coarse_offset, plan.fine_offset};
    const auto& states = trajectory.states;

    EnergyBoxResult result;
    FdAccumulator acc;
    for (std::size_t centre : plan.time_indices) {
        EnergyProbe probe;
        probe.t = states[centre].t;
        bool ok = true;
        for (int level = 0; level < 2 && ok; ++level) {
            const FrameEntry* mid = cache.get(centre);
            const FrameEntry* lo = cache.get(centre - offsets[level]);
            const FrameEntry* hi = cache.get(centre + offsets[level]);
            if (!mid || !lo || !hi) {
                ok = false;
                break;
            }
            const double span = states[centre + offsets[level]].t -
                                states[centre - offsets[level]].t;
            const double q_hi =
                integrate_grid(hi->frame.pi_star_s_inv(), nullptr, axes[level], h).volume;
            const double q_lo =
                integrate_grid(lo->frame.pi_star_s_inv(), nullptr, axes[level], h).volume;
            probe.lhs[level] = (q_hi - q_lo) / span;
            probe.rhs[level] =
                integrate_grid(mid->frame.pi_star_s_inv(), &mid->h_tilde, axes[level], h).flux;
        }
        if (!ok) {
            ++acc.skipped;
            continue;
        }
        const double diff[2] = {std::abs(probe.lhs[0] - probe.rhs[0]),
                                std::abs(probe.lhs[1] - probe.rhs[1])};
        const double scale = std::max(std::abs(probe.lhs[0]), std::abs(probe.rhs[0]));
        acc.coarse_sum += diff[0];
        acc.fine_sum += diff[1];
        acc.scale_sum += scale;
        acc.max_relative = std::max(acc.max_relative, diff[0] / (1.0 + scale));
        ++acc.evaluated;
        result.probes.push_back(probe);
    }
    result.check = finish_fd("energy_box", acc, tol.energy, tol);
    return result;
}

CheckResult check_monotonicity(const Trajectory& trajectory, const GbdtTriple& triple,
                               const HamiltonianFamily& family, const Tolerances& tol) {
    CheckResult out;
    out.name = "monotonicity";
    out.tolerance = tol.monotonicity;
    for (const auto& state : trajectory.states) {
        if (family.min_eigenvalue(state.t, triple.r()) < -1e-12) {
            out.verdict = Verdict::NotApplicable;
            std::ostringstream os;
            os << "Hamiltonians are not positive semidefinite at t = " << state.t;
            out.detail = os.str();
            return out;
        }
    }

    const GbdtDynamics dynamics(triple, family);
    out.residual = -std::numeric_limits<double>::infinity();
    for (const auto& state : trajectory.states) {
        const ComplexMatrix ds = dynamics.rhs(state.t, state.pi).s;
        out.residual = std::max(out.residual, hermitian_eigenvalues(ds).maxCoeff());
    }
    bool sign_kept = true;
    std::ostringstream os;
    os << "max eig S'(t) over " << trajectory.states.size() << " states";

    const Eigen::VectorXd ev0 = hermitian_eigenvalues(triple.s0);
    if (ev0.maxCoeff() < 0.0) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& state : trajectory.states) {
            if (state.t > 0.0) {
                worst = std::max(worst, hermitian_eigenvalues(state.s).maxCoeff());
            }
        }
        if (std::isfinite(worst)) {
            sign_kept = worst <= ev0.maxCoeff() + 1e-10 && worst < 0.0;
            os << "; S(0) < 0, max eig S(t) on t > 0: " << worst;
        }
    } else if (ev0.minCoeff() > 0.0) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& state : trajectory.states) {
            if (state.t < 0.0) {
                worst = std::min(worst, hermitian_eigenvalues(state.s).minCoeff());
            }
        }
        if (std::isfinite(worst)) {
            sign_kept = worst >= ev0.minCoeff() - 1e-10 && worst > 0.0;
            os << "; S(0) > 0, min eig S(t) on t < 0: " << worst;
        }
    }
    out.verdict = out.residual <= out.tolerance && sign_kept ? Verdict::Pass : Verdict::Fail;
    out.detail = os.str();
    return out;
}

CheckResult check_quadratic_form(const Trajectory& trajectory, const GbdtTriple& triple,
                                 const HamiltonianFamily& family, const ProbePlan& plan,
                                 const Tolerances& tol) {
    CheckResult out;
    out.name = "quadratic_form";
    out.tolerance = tol.quadratic_form;
    FrameCache cache(trajectory, triple, &family, tol);
    std::size_t evaluated = 0;
    for (std::size_t idx : plan.time_indices) {
        const FrameEntry* entry = cache.get(idx);
        if (!entry) {
            ++out.skipped;
            continue;
        }
        for (const auto& zeta : plan.zetas) {
            const ComplexMatrix psi = entry->frame.psi(zeta);
            for (std::size_t k = 0; k < triple.r(); ++k) {
                const ComplexMatrix direct = psi.adjoint() * entry->h_tilde[k] * psi;
                const ComplexMatrix simplified = entry->frame.quadratic_form(zeta, k, entry->h[k]);
                out.residual = std::max(out.residual,
                                        (simplified - direct).norm() / (1.0 + direct.norm()));
            }
            ++evaluated;
        }
    }
    out.verdict = evaluated > 0 && out.residual <= out.tolerance ? Verdict::Pass : Verdict::Fail;
    out.detail = "points evaluated=" + std::to_string(evaluated);
    return out;
}

CheckResult check_closed_form(const Trajectory& trajectory, const ClosedFormExample& example,
                              const Tolerances& tol) {
    CheckResult out;
    out.name = "closed_form";
    out.tolerance = tol.closed_form;
    double worst_t = 0.0;
    for (const auto& state : trajectory.states) {
        const EvolvedState exact = example.state_at(state.t);
        const double scale = 1.0 + std::max(exact.pi.norm(), exact.s.norm());
        const double diff = std::max((state.pi - exact.pi).norm(), (state.s - exact.s).norm());
        if (diff / scale > out.residual) {
            out.residual = diff / scale;
            worst_t = state.t;
        }
    }
    double sylvester = 0.0;
    for (double r : example.sylvester_residuals()) {
        sylvester = std::max(sylvester, r);
    }
    out.verdict = out.residual <= out.tolerance ? Verdict::Pass : Verdict::Fail;
    std::ostringstream os;
    os << "worst_t=" << worst_t << " sylvester_residual=" << sylvester;
    out.detail = os.str();
    return out;
}

} // namespace gbdt
