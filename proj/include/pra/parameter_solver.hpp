#pragma once

// Optimal readout-pulse parameters for projecting onto equal-magnitude qutrit
// states (e^{i phi_0}|0> + e^{i phi_1}|1> + e^{i phi_2}|2>)/sqrt(3).
//
// The outer bins take their phase straight from the outer pulses
// (theta_0 = phi_2, theta_2 = phi_0) and equal outer magnitudes force
// P_0 = P_2. After removing phi_1 as a global phase everything depends on
// P_0, theta_1 and phi_tot = (phi_0 - phi_1) + (phi_2 - phi_1) only; P_1 then
// follows from equal bin magnitudes and a 1-D maximisation over P_0 fixes the
// rest.

#include "pra/effective_model.hpp"

#include <array>
#include <string>
#include <vector>

namespace pra {

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

struct ProjectorTarget
{
    std::array<double, 3> phi{};
    double eta = 0.0;

    TimeBinState state() const;
};

struct SolverResult
{
    ProjectorTarget target;
    std::array<ReadoutPulse, 3> pulses{ReadoutPulse{0.0, 0.0}, ReadoutPulse{0.0, 0.0},
                                       ReadoutPulse{0.0, 0.0}};
    double eta = 0.0;
    double reduced_theta1 = 0.0;
    double phi_tot = 0.0;
};

using Basis = std::array<TimeBinState, 3>;

struct MubSet
{
    Basis mub1;
    Basis mub2;
    Basis mub3;
    Basis optimal;

    static Basis canonical();
};

MubSet canonical_mub_set();

/// Looks up "mub1", "mub2", "mub3" or "optimal".
const Basis& basis_by_name(const MubSet& set, const std::string& name);

/// max_ij | |<a_i|b_j>|^2 - 1/3 |; throws argument_error on non-orthonormal input.
double unbiasedness_check(const Basis& a, const Basis& b);

/// Max deviation of the Gram matrix from the identity.
double orthonormality_residual(const Basis& basis);

struct ReducedPhases
{
    double phi0 = 0.0;
    double phi2 = 0.0;
    double phi_tot = 0.0;
};

ReducedPhases reduce_phases(double phi0, double phi1, double phi2);

/// Central-bin amplitude divided by sqrt(P_1), in the reduced frame.
cplx central_factor(double p0, double theta1, double phi_tot);

/// Both roots of Im(central_factor) = 0, wrapped into (-pi, pi].
std::array<double, 2> solve_theta1(double p0, double phi_tot);

/// The root with a positive real central factor (the central bin then has phase 0).
double select_theta1(double p0, double phi_tot);

/// Equal-magnitude condition solved for P_1.
double solve_p1(double p0, double theta1, double phi_tot);

struct EfficiencyOptimum
{
    double p0 = 0.0;
    double p1 = 0.0;
    double reduced_theta1 = 0.0;
    double eta = 0.0;
};

/// eta(P_0) = 3 (1 - P_0) P_0 (1 - P_1(P_0)) along the selected theta_1 branch.
double eta_of_p0(double p0, double phi_tot);

EfficiencyOptimum maximize_eta(double phi_tot);

SolverResult solve_projector(double phi0, double phi1, double phi2);

SolverResult solve_projector(const TimeBinState& target);

struct Table1Row
{
    std::string basis;
    int vector_index = 0;
    SolverResult result;
};

std::vector<Table1Row> build_table1();

std::string table1_csv(const std::vector<Table1Row>& rows);

/// Phases (arg of each component) of an equal-magnitude target, relative to nothing.
std::array<double, 3> phases_of(const TimeBinState& target);

} // namespace pra
