#pragma once

// Per-cell update of all detuning classes over one time step.
//
// Each class holds amplitudes (c_g, c_s, c_e) in structure-of-arrays form.
// One step applies a half free rotation of c_e, the exact exponential of the
// two-field star coupling, and the second half rotation, then returns
// sum_k w_k c_e c_g^* (the polarisation source, without the factor i).

#include <cstddef>

namespace pra::kernels {

struct ClassBlock
{
    double* cg_re;
    double* cg_im;
    double* cs_re;
    double* cs_im;
    double* ce_re;
    double* ce_im;
    /// e^{-i delta h / 2} per class
    const double* rot_re;
    const double* rot_im;
    const double* weight;
    std::size_t n;
};

/// Coupling for one cell and step. With R = sqrt(|E|^2 + |W|^2), chi = R h / 2
/// and u = (E^*, W) / R on (g, s):
///   p    = <u|c_gs>
///   c_e' = cos(chi) c_e + i sin(chi) p
///   c_gs' = c_gs + u ((cos(chi) - 1) p + i sin(chi) c_e)
struct Coupling
{
    double cos_chi = 1.0;
    /// cos(chi) - 1, computed without cancellation
    double cos_m1 = 0.0;
    double sin_chi = 0.0;
    double ug_re = 0.0, ug_im = 0.0;
    double us_re = 0.0, us_im = 0.0;
};

/// Builds the coupling from probe E and control W (rad/s) over step h.
Coupling make_coupling(double e_re, double e_im, double w_re, double w_im, double h);

struct Polarization
{
    double re = 0.0;
    double im = 0.0;
};

using CellStepFn = Polarization (*)(const ClassBlock&, const Coupling&);

Polarization cell_step_scalar(const ClassBlock& block, const Coupling& c);

#if defined(PRA_HAVE_AVX2_KERNEL)
Polarization cell_step_avx2(const ClassBlock& block, const Coupling& c);
#endif

/// True when the CPU supports AVX2 and FMA and the AVX2 kernel was built.
bool avx2_available();

/// Picks the fastest available kernel. PRA_KERNEL=scalar forces the reference kernel.
CellStepFn select_cell_step();

const char* kernel_name(CellStepFn fn);

} // namespace pra::kernels
