#pragma once

// Overlap matrices, average fidelity, visibility scans and sinusoid fits.

#include "pra/mb_simulator.hpp"
#include "pra/parameter_solver.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pra {

enum class OverlapSource { effective, simulation, synthetic };

const char* to_string(OverlapSource s);

/// m[j][i]: analyzer j, input i.
struct OverlapMatrix
{
    std::array<std::array<double, 3>, 3> m{};
    OverlapSource source = OverlapSource::effective;

    static OverlapMatrix from(const BasisSimulation& sim);
};

/// sum_i m[i][i] / sum_ij m[j][i]; argument_error for an all-zero or negative matrix.
double average_fidelity(const OverlapMatrix& m);

/// Effective-model overlaps: project() of each basis input through each analyzer.
OverlapMatrix effective_overlap(const Basis& inputs, const std::array<SolverResult, 3>& analyzers);

/// Solves the three projectors of a basis.
std::array<SolverResult, 3> solve_basis(const Basis& basis);

struct SinusoidFit
{
    /// y = amplitude cos(2 (phi - offset)) + mean
    double amplitude = 0.0;
    double offset = 0.0;
    double mean = 0.0;
    /// root-mean-square residual
    double residual = 0.0;
    /// false when the samples carry no modulation (offset meaningless)
    bool offset_defined = true;
};

/// Linear least squares on (cos 2phi, sin 2phi, 1). Needs >= 4 samples spanning
/// at least half a period (pi / 2).
SinusoidFit fit_sinusoid(std::span<const double> phi, std::span<const double> y);

/// Input rotation plane: |psi(phi)> = cos phi |psi_0> + sin phi |psi_b>, b = 1 or 2.
enum class Plane { p01, p02 };

Plane parse_plane(const std::string& s);
const char* to_string(Plane p);

/// Normalised cos phi |b_0> + sin phi |b_other>.
TimeBinState rotated_input(const Basis& basis, Plane plane, double phi);

/// Overlaps of one input with the three projectors of an analyzer setting.
using ProjectionBackend = std::function<std::array<double, 3>(const TimeBinState&)>;

/// Solved analyzers evaluated with the effective model.
ProjectionBackend effective_backend(const Basis& basis);

/// Ideal projectors of efficiency eta whose basis is rotated in `plane` by `angle`.
ProjectionBackend rotated_backend(const Basis& basis, Plane plane, double angle, double eta = 1.0);

/// Maxwell-Bloch read-out; overlap = interference energy / (eta0 * input energy).
ProjectionBackend simulation_backend(StorageSession& session, const Basis& basis,
                                     const TransferCalibration& calibration);

struct VisibilityCurve
{
    int projector = 0;
    Plane plane = Plane::p01;
    std::vector<double> phi;
    std::vector<double> overlap;
    SinusoidFit fit;
};

/// Uniform grid of n angles on [0, pi).
std::vector<double> phi_grid(int n);

/// One fitted curve per projector. Needs at least 8 angles.
std::array<VisibilityCurve, 3> visibility_scan(const Basis& basis, Plane plane,
                                               std::span<const double> phis,
                                               const ProjectionBackend& backend);

} // namespace pra
