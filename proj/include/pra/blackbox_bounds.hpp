#pragma once

// Efficiency bounds for unitary devices that combine three neighbouring time
// bins into one bright output bin.
//
// A unitary box maps |n>|bright> to sqrt(eta/3)(|n> + e^{i phi_1}|n+1> +
// e^{i phi_2}|n+2>) + sqrt(1-eta)|psi_n>. Orthogonal inputs must stay
// orthogonal, which ties eta to the autocorrelation of the dark vector.
// Time-translation symmetry writes the dark vector as a fixed profile a_k
// shifted by n.

#include "pra/effective_model.hpp"
#include "pra/parameter_solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pra {

struct DarkPortProfile
{
    std::vector<cplx> a;
    double eta = 0.0;
};

/// Phases of the bright-port superposition; defaults are those of the optimal basis.
struct BrightPhases
{
    double phi1 = -1.5707963267948966;
    double phi2 = 0.0;
};

/// sum_k a_k^* a_{k+shift}, i.e. <psi_{n+shift}|psi_n>.
cplx dark_autocorrelation(const std::vector<cplx>& a, int shift);

/// Residual of the orthogonality condition between inputs n and n+shift.
/// shift 2: | eta/3 - (1-eta) |<psi_{n+2}|psi_n>| |
/// shift 1: | eta/3 (e^{i phi_1} + e^{i(phi_2-phi_1)}) + (1-eta) <psi_{n+1}|psi_n> |
double overlap_residual(double eta, const DarkPortProfile& profile, int shift,
                        const BrightPhases& phases = {});

/// sup eta subject to eta/3 <= (1 - eta) * overlap_cap, found by scan + bisection.
double max_eta_generic(double overlap_cap = 1.0);

struct StructuredBound
{
    int support = 0;
    double sup_eta = 0.0;
    /// Dark-profile magnitudes attaining sup_eta (length = support).
    std::vector<double> witness;
    /// Support patterns surviving the shift >= 3 orthogonality constraints.
    int feasible_patterns = 0;
};

/// Grid maximisation of eta over dark profiles with support length L (1..8).
StructuredBound max_eta_structured(int support);

struct SupportLemmaReport
{
    int trials = 0;
    int largest_initial_support = 0;
    int largest_surviving_support = 0;
    /// Max deviation between the full autocorrelation and its single surviving term.
    double max_single_term_error = 0.0;

    bool passed() const { return largest_surviving_support <= 3; }
};

/// Random complex profiles of support 4..max_L, reduced by iteratively applying the
/// orthogonality of inputs more than two bins apart.
SupportLemmaReport dark_support_lemma_check(int max_support, int trials = 1000,
                                            std::uint64_t seed = 1);

/// Runs the reduction on one profile; returns the reduced profile.
std::vector<cplx> reduce_dark_support(std::vector<cplx> a, double* single_term_error = nullptr);

/// Largest index distance between nonzero entries, plus one (0 for the zero profile).
int support_length(const std::vector<cplx>& a, double tol = 0.0);

struct AttainmentReport
{
    double eta = 0.0;
    BrightPhases phases;
    /// Dark profile normalised to unit length, global phase fixed by the bright |n> term.
    std::vector<cplx> dark;
    double dark_norm_error = 0.0;
    /// Max deviation of bright magnitudes from sqrt(eta/3).
    double bright_magnitude_error = 0.0;
    double residual_shift1 = 0.0;
    double residual_shift2 = 0.0;
    /// | eta/3 e^{i phi_2} + (1-eta) <psi_2|psi_0> |
    double residual_shift2_complex = 0.0;
};

/// Reads the bright and dark blocks of a solved analyzer and evaluates the constraints.
AttainmentReport check_attainment(const SolverResult& analyzer);

/// CSV with columns L,sup_eta,feasible_patterns,a0..a{max-1}.
std::string bounds_csv(const std::vector<StructuredBound>& rows);

} // namespace pra
