#include "pra/analysis.hpp"

#include "pra/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pra {

const char* to_string(OverlapSource s)
{
    switch (s) {
    case OverlapSource::effective: return "effective";
    case OverlapSource::simulation: return "simulation";
    case OverlapSource::synthetic: return "synthetic";
    }
    return "?";
}

OverlapMatrix OverlapMatrix::from(const BasisSimulation& sim)
{
    return {sim.overlap, OverlapSource::simulation};
}

double average_fidelity(const OverlapMatrix& m)
{
    double diag = 0.0, total = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 3; ++i) {
            const double v = m.m[j][i];
            if (!(v >= 0.0) || !std::isfinite(v))
                throw argument_error("overlap entries must be finite and nonnegative");
            total += v;
            if (i == j)
                diag += v;
        }
    if (total == 0.0)
        throw argument_error("fidelity undefined for an all-zero overlap matrix");
    return diag / total;
}

std::array<SolverResult, 3> solve_basis(const Basis& basis)
{
    return {solve_projector(basis[0]), solve_projector(basis[1]), solve_projector(basis[2])};
}

OverlapMatrix effective_overlap(const Basis& inputs, const std::array<SolverResult, 3>& analyzers)
{
    OverlapMatrix out;
    out.source = OverlapSource::effective;
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 3; ++i)
            out.m[j][i] = project(inputs[i], analyzers[j].pulses);
    return out;
}

SinusoidFit fit_sinusoid(std::span<const double> phi, std::span<const double> y)
{
    if (phi.size() != y.size())
        throw argument_error("fit_sinusoid: phi and y differ in length");
    if (phi.size() < 4)
        throw argument_error("fit_sinusoid needs at least 4 samples");
    const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
    if (*hi - *lo < 0.5 * std::numbers::pi - 1e-12)
        throw argument_error("fit_sinusoid samples must span at least half a period");

    const auto n = static_cast<Eigen::Index>(phi.size());
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double p = phi[static_cast<std::size_t>(k)];
        a(k, 0) = std::cos(2 * p);
        a(k, 1) = std::sin(2 * p);
        a(k, 2) = 1.0;
        b(k) = y[static_cast<std::size_t>(k)];
    }
    const Eigen::Vector3d x = a.colPivHouseholderQr().solve(b);

    SinusoidFit f;
    f.amplitude = std::hypot(x(0), x(1));
    f.mean = x(2);
    f.residual = std::sqrt((a * x - b).squaredNorm() / static_cast<double>(n));
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (f.amplitude <= 1e-12 * scale) {
        f.amplitude = 0.0;
        f.offset = 0.0;
        f.offset_defined = false;
    } else {
        f.offset = 0.5 * std::atan2(x(1), x(0));
    }
    return f;
}

Plane parse_plane(const std::string& s)
{
    if (s == "0-1" || s == "01")
        return Plane::p01;
    if (s == "0-2" || s == "02")
        return Plane::p02;
    throw argument_error("unknown plane '" + s + "' (expected 0-1 or 0-2)");
}

const char* to_string(Plane p) { return p == Plane::p01 ? "0-1" : "0-2"; }

namespace {

std::size_t partner(Plane plane) { return plane == Plane::p01 ? 1 : 2; }

std::vector<cplx> combine(const TimeBinState& a, double ca, const TimeBinState& b, double cb)
{
    std::vector<cplx> v(a.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = ca * a[k] + cb * b[k];
    return v;
}

} // namespace

TimeBinState rotated_input(const Basis& basis, Plane plane, double phi)
{
    auto v = combine(basis[0], std::cos(phi), basis[partner(plane)], std::sin(phi));
    double n = 0.0;
    for (const auto& c : v)
        n += std::norm(c);
    n = std::sqrt(n);
    for (auto& c : v)
        c /= n;
    return TimeBinState(std::move(v));
}

ProjectionBackend effective_backend(const Basis& basis)
{
    const auto analyzers = solve_basis(basis);
    return [analyzers](const TimeBinState& input) {
        std::array<double, 3> out{};
        for (std::size_t j = 0; j < 3; ++j)
            out[j] = project(input, analyzers[j].pulses);
        return out;
    };
}

ProjectionBackend rotated_backend(const Basis& basis, Plane plane, double angle, double eta)
{
    // rotate the pair (b_0, b_partner) by `angle`, leave the third vector alone
    const std::size_t p = partner(plane);
    std::array<std::vector<cplx>, 3> proj;
    for (std::size_t j = 0; j < 3; ++j)
        proj[j] = basis[j].amplitudes();
    const double c = std::cos(angle), s = std::sin(angle);
    proj[0] = combine(basis[0], c, basis[p], s);
    proj[p] = combine(basis[0], -s, basis[p], c);
    return [proj, eta](const TimeBinState& input) {
        std::array<double, 3> out{};
        for (std::size_t j = 0; j < 3; ++j) {
            cplx ip = 0.0;
            for (std::size_t k = 0; k < input.size(); ++k)
                ip += std::conj(proj[j][k]) * input[k];
            out[j] = eta * std::norm(ip);
        }
        return out;
    };
}

ProjectionBackend simulation_backend(StorageSession& session, const Basis& basis,
                                     const TransferCalibration& calibration)
{
    const auto analyzers = solve_basis(basis);
    return [&session, analyzers, &calibration](const TimeBinState& input) {
        const auto& amps = input.amplitudes();
        const double eta0 = session.run_storage(amps).eta0;
        std::array<double, 3> out{};
        for (std::size_t j = 0; j < 3; ++j) {
            const auto r = session.run_pra(amps, analyzers[j], calibration);
            out[j] = r.interference_energy / (eta0 * r.input_energy);
        }
        return out;
    };
}

std::vector<double> phi_grid(int n)
{
    if (n < 1)
        throw argument_error("phi grid needs at least one point");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        g[static_cast<std::size_t>(k)] = std::numbers::pi * k / n;
    return g;
}

std::array<VisibilityCurve, 3> visibility_scan(const Basis& basis, Plane plane,
                                               std::span<const double> phis,
                                               const ProjectionBackend& backend)
{
    if (phis.size() < 8)
        throw argument_error("visibility scan needs at least 8 angles");
    std::array<VisibilityCurve, 3> curves;
    for (int j = 0; j < 3; ++j) {
        auto& c = curves[static_cast<std::size_t>(j)];
        c.projector = j;
        c.plane = plane;
        c.phi.assign(phis.begin(), phis.end());
        c.overlap.reserve(phis.size());
    }
    for (double phi : phis) {
        const auto o = backend(rotated_input(basis, plane, phi));
        for (std::size_t j = 0; j < 3; ++j)
            curves[j].overlap.push_back(o[j]);
    }
    for (auto& c : curves)
        c.fit = fit_sinusoid(c.phi, c.overlap);
    return curves;
}

} // namespace pra
