#include "pra/parameter_solver.hpp"

#include "pra/errors.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace pra {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double imag_tolerance = 1e-10;
constexpr double singular_tolerance = 1e-9;

bool is_odd_multiple_of_pi(double angle)
{
    return std::abs(std::abs(wrap_angle(angle)) - pi) < singular_tolerance;
}

} // namespace

double wrap_angle(double angle)
{
    const double two_pi = 2.0 * pi;
    double out = angle - two_pi * std::ceil((angle - pi) / two_pi);
    if (out <= -pi)
        out += two_pi;
    return out;
}

TimeBinState ProjectorTarget::state() const
{
    return TimeBinState::equal_magnitude(phi);
}

Basis MubSet::canonical()
{
    return {TimeBinState({1.0, 0.0, 0.0}), TimeBinState({0.0, 1.0, 0.0}),
            TimeBinState({0.0, 0.0, 1.0})};
}

MubSet canonical_mub_set()
{
    const double w = 2.0 * pi / 3.0;
    auto v = [](double p0, double p1, double p2) {
        const std::array<double, 3> phases{p0, p1, p2};
        return TimeBinState::equal_magnitude(phases);
    };
    MubSet set{
        {v(0, 0, 0), v(0, -w, w), v(0, w, -w)},
        {v(0, 0, -w), v(0, -w, 0), v(-w, 0, 0)},
        {v(0, 0, w), v(0, w, 0), v(w, 0, 0)},
        {v(0, pi / 2, 0), v(-w, pi / 2, w), v(w, pi / 2, -w)},
    };
    return set;
}

const Basis& basis_by_name(const MubSet& set, const std::string& name)
{
    if (name == "mub1")
        return set.mub1;
    if (name == "mub2")
        return set.mub2;
    if (name == "mub3")
        return set.mub3;
    if (name == "optimal")
        return set.optimal;
    throw argument_error("unknown basis '" + name + "' (expected mub1, mub2, mub3, optimal)");
}

double orthonormality_residual(const Basis& basis)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const cplx target = i == j ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(basis[i].inner(basis[j]) - target));
        }
    return worst;
}

double unbiasedness_check(const Basis& a, const Basis& b)
{
    for (const auto* basis : {&a, &b}) {
        for (const auto& v : *basis)
            if (v.size() != 3)
                throw argument_error("unbiasedness check expects qutrit vectors");
        if (orthonormality_residual(*basis) > 1e-9)
            throw argument_error("unbiasedness check expects orthonormal bases");
    }
    double worst = 0.0;
    for (const auto& va : a)
        for (const auto& vb : b)
            worst = std::max(worst, std::abs(std::norm(va.inner(vb)) - 1.0 / 3.0));
    return worst;
}

ReducedPhases reduce_phases(double phi0, double phi1, double phi2)
{
    ReducedPhases r;
    r.phi0 = wrap_angle(phi0 - phi1);
    r.phi2 = wrap_angle(phi2 - phi1);
    r.phi_tot = wrap_angle(r.phi0 + r.phi2);
    return r;
}

cplx central_factor(double p0, double theta1, double phi_tot)
{
    return (1.0 - p0) * std::polar(1.0, -theta1) - p0 * std::polar(1.0, theta1 - phi_tot);
}

std::array<double, 2> solve_theta1(double p0, double phi_tot)
{
    if (!(p0 > 0.0 && p0 < 1.0))
        throw argument_error("solve_theta1 needs 0 < P0 < 1");

    // (1 - P0) sin(t) + P0 sin(t - phi) = 0  <=>  tan(t) = P0 sin(phi) / (1 - P0 + P0 cos(phi))
    const double num = p0 * std::sin(phi_tot);
    const double den = 1.0 - p0 + p0 * std::cos(phi_tot);
    double root = 0.0;
    if (is_odd_multiple_of_pi(phi_tot) && std::abs(den) < singular_tolerance) {
        // P0 = 1/2 and phi_tot = pi: the equation holds for every theta_1; keep
        // the limit of the regular branches.
        root = 0.0;
    } else {
        root = std::atan2(num, den);
    }
    std::array<double, 2> roots{wrap_angle(root), wrap_angle(root + pi)};
    for (double t : roots)
        if (std::abs(central_factor(p0, t, phi_tot).imag()) > imag_tolerance)
            throw numerical_error("theta_1 root fails the central-phase residual check");
    return roots;
}

double solve_p1(double p0, double theta1, double phi_tot)
{
    if (!(p0 > 0.0 && p0 < 1.0))
        throw argument_error("solve_p1 needs 0 < P0 < 1");
    const double outer = (1.0 - p0) * p0;
    const double central = std::norm(central_factor(p0, theta1, phi_tot));
    if (central < 1e-14)
        throw degenerate_projector_error("central bin is unreachable for these parameters");
    return outer / (central + outer);
}

double eta_of_p0(double p0, double phi_tot)
{
    const double theta1 = select_theta1(p0, phi_tot);
    const double p1 = solve_p1(p0, theta1, phi_tot);
    return 3.0 * (1.0 - p0) * p0 * (1.0 - p1);
}

double select_theta1(double p0, double phi_tot)
{
    const auto roots = solve_theta1(p0, phi_tot);
    double best = 0.0;
    double best_eta = -1.0;
    for (double t : roots) {
        const cplx z = central_factor(p0, t, phi_tot);
        if (z.real() <= 0.0 || std::abs(z.imag()) > imag_tolerance)
            continue;
        const double outer = (1.0 - p0) * p0;
        const double p1 = outer / (std::norm(z) + outer);
        const double eta = 3.0 * outer * (1.0 - p1);
        if (eta > best_eta) {
            best_eta = eta;
            best = t;
        }
    }
    if (best_eta < 0.0)
        throw degenerate_projector_error("no theta_1 branch gives a positive central amplitude");
    return best;
}

EfficiencyOptimum maximize_eta(double phi_tot)
{
    phi_tot = wrap_angle(phi_tot);
    EfficiencyOptimum opt;

    if (is_odd_multiple_of_pi(phi_tot)) {
        opt.p0 = 0.5;
        opt.reduced_theta1 = 0.0;
        opt.p1 = solve_p1(opt.p0, opt.reduced_theta1, pi);
        opt.eta = 3.0 * 0.25 * (1.0 - opt.p1);
    } else {
        auto safe_eta = [phi_tot](double p0) {
            try {
                return eta_of_p0(p0, phi_tot);
            } catch (const degenerate_projector_error&) {
                return 0.0;
            }
        };
        constexpr int grid_points = 2000;
        constexpr double lo = 0.001, hi = 0.999;
        const double step = (hi - lo) / (grid_points - 1);
        int best = 0;
        double best_eta = -1.0;
        for (int i = 0; i < grid_points; ++i) {
            // eta(P0) and eta(1 - P0) can tie; keep the lower transfer probability
            const double eta = safe_eta(lo + step * i);
            if (eta > best_eta + 1e-12) {
                best_eta = eta;
                best = i;
            }
        }
        double a = lo + step * std::max(best - 1, 0);
        double b = lo + step * std::min(best + 1, grid_points - 1);
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = safe_eta(c);
        double fd = safe_eta(d);
        while (b - a > 1e-10) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = safe_eta(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = safe_eta(d);
            }
        }
        opt.p0 = 0.5 * (a + b);
        opt.reduced_theta1 = select_theta1(opt.p0, phi_tot);
        opt.p1 = solve_p1(opt.p0, opt.reduced_theta1, phi_tot);
        opt.eta = 3.0 * (1.0 - opt.p0) * opt.p0 * (1.0 - opt.p1);
    }

    // Cross-check against the closed-form bright amplitudes of the analyzer that
    // projects onto the reduced target (phi_tot, 0, 0).
    const std::array<ReadoutPulse, 3> pulses{ReadoutPulse(opt.p0, 0.0),
                                             ReadoutPulse(opt.p1, opt.reduced_theta1),
                                             ReadoutPulse(opt.p0, phi_tot)};
    const auto zeta = bright_amplitudes(pulses).zeta;
    const double oracle = 3.0 * std::norm(zeta[0]);
    if (std::abs(oracle - opt.eta) > 1e-9 ||
        std::abs(std::norm(zeta[1]) - std::norm(zeta[0])) > 1e-9 ||
        std::abs(std::norm(zeta[2]) - std::norm(zeta[0])) > 1e-9)
        throw numerical_error("optimised efficiency disagrees with the bright-amplitude oracle");
    return opt;
}

SolverResult solve_projector(double phi0, double phi1, double phi2)
{
    const auto reduced = reduce_phases(phi0, phi1, phi2);
    const auto opt = maximize_eta(reduced.phi_tot);

    SolverResult r;
    r.target.phi = {phi0, phi1, phi2};
    r.target.eta = opt.eta;
    r.eta = opt.eta;
    r.reduced_theta1 = opt.reduced_theta1;
    r.phi_tot = reduced.phi_tot;
    r.pulses = {ReadoutPulse(opt.p0, wrap_angle(phi2)),
                ReadoutPulse(opt.p1, wrap_angle(opt.reduced_theta1 + phi1)),
                ReadoutPulse(opt.p0, wrap_angle(phi0))};
    return r;
}

std::array<double, 3> phases_of(const TimeBinState& target)
{
    if (target.size() != 3)
        throw argument_error("projector targets are qutrit states");
    std::array<double, 3> phi{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (std::abs(std::abs(target[i]) - 1.0 / std::sqrt(3.0)) > 1e-9)
            throw argument_error("projector targets must have equal magnitudes 1/sqrt(3)");
        phi[i] = std::arg(target[i]);
    }
    return phi;
}

SolverResult solve_projector(const TimeBinState& target)
{
    const auto phi = phases_of(target);
    return solve_projector(phi[0], phi[1], phi[2]);
}

std::vector<Table1Row> build_table1()
{
    const auto set = canonical_mub_set();
    std::vector<Table1Row> rows;
    for (const char* name : {"mub1", "mub2", "mub3", "optimal"}) {
        const auto& basis = basis_by_name(set, name);
        for (int i = 0; i < 3; ++i)
            rows.push_back({name, i, solve_projector(basis[static_cast<std::size_t>(i)])});
    }
    return rows;
}

std::string table1_csv(const std::vector<Table1Row>& rows)
{
    std::ostringstream os;
    os << "basis,vector_index,phi0,phi1,phi2,P0,P1,P2,theta0,theta1,theta2,eta\n";
    char buf[64];
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.12g", x);
        return std::string(buf);
    };
    for (const auto& row : rows) {
        const auto& r = row.result;
        os << row.basis << ',' << row.vector_index;
        for (double phi : r.target.phi)
            os << ',' << num(phi);
        for (const auto& p : r.pulses)
            os << ',' << num(p.transfer_probability());
        for (const auto& p : r.pulses)
            os << ',' << num(p.phase());
        os << ',' << num(r.eta) << '\n';
    }
    return os.str();
}

} // namespace pra
