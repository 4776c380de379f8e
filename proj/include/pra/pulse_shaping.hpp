#pragma once

// Field envelopes: hyperbolic-square-hyperbolic (HSH) chirped pulses, their
// three-component composites, and Gaussian time-bin trains.
//
// All envelopes are complex Rabi frequencies in rad/s. Frequencies given in
// Hz are ordinary (cycles per second) values; the 2 pi is applied here.

#include "pra/effective_model.hpp"

#include <array>
#include <string>
#include <vector>

namespace pra {

struct HshPulse
{
    /// Full chirp range, Hz.
    double gamma_hz = 1.5e6;
    /// Ramp duration, s.
    double th_s = 3e-6;
    /// Plateau duration, s.
    double ts_s = 6e-6;
    /// Truncation window, s.
    double tc_s = 12e-6;
    /// Peak Rabi frequency Omega / 2 pi, Hz.
    double rabi_hz = 350e3;
    double phase = 0.0;
    double scale = 1.0;
    double center_offset_hz = 0.0;

    /// Throws config_error on non-physical parameters.
    void validate() const;

    /// sech decay constant; the ramp amplitude is 1% at the truncation edge.
    double mu() const;
    /// Plateau chirp rate in Hz/s chosen so the full sweep equals gamma_hz.
    double chirp_rate() const;
};

/// Field at time t relative to the plateau midpoint.
cplx hsh_envelope(const HshPulse& p, double t);

/// Instantaneous frequency offset (Hz) at time t; zero outside the window.
double hsh_frequency(const HshPulse& p, double t);

struct ChshPulse
{
    HshPulse shape;
    std::array<double, 3> scales{1.0, 0.0, 0.0};
    std::array<double, 3> phases{0.0, 0.0, 0.0};
    double tau_s = 0.0;
};

/// sum_n E_n e^{i theta_n} f(t + n tau): component n is centred at -n tau.
cplx chsh_envelope(const ChshPulse& p, double t);

/// Uniform time grid t_k = t0 + k dt.
struct TimeGrid
{
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t n = 0;

    double at(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
};

/// Samples per 1/(Gamma + Omega) used when no step is given.
inline constexpr double default_samples_per_period = 40.0;

double default_pulse_dt(const HshPulse& p);

/// Throws config_error when dt cannot resolve Gamma + Omega (Nyquist).
void check_pulse_sampling(const HshPulse& p, double dt);

/// Samples the composite centred at `center`.
std::vector<cplx> chsh_compose(const ChshPulse& p, double center, const TimeGrid& grid);

struct BinTrain
{
    std::vector<cplx> amplitudes;
    double tau_s = 1.67e-6;
    /// Ratio between bin width and intensity FWHM.
    double width_ratio = 2.38;
    /// Peak Rabi frequency (rad/s) of a unit amplitude.
    double peak_rabi = 1.0;

    double fwhm() const { return tau_s / width_ratio; }
    /// Start of the first bin.
    double t_start = 0.0;
};

/// Truncated-Gaussian amplitude of the train at time t.
cplx gaussian_train_at(const BinTrain& train, double t);

std::vector<cplx> gaussian_train(const BinTrain& train, const TimeGrid& grid);

/// CSV with columns t_s,re,im.
std::string waveform_csv(const std::vector<cplx>& samples, const TimeGrid& grid);

} // namespace pra
