#include "pra/pulse_shaping.hpp"

#include "pra/errors.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace pra {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double edge_level = 100.0; // 1 / sech at the truncation edge

double ramp_half_width(const HshPulse& p) { return 0.5 * (p.tc_s - p.ts_s); }

// Even part of the accumulated phase (in cycles) at |s| = x.
double even_phase(const HshPulse& p, double x)
{
    const double r = p.chirp_rate();
    const double half = 0.5 * p.ts_s;
    if (x <= half)
        return 0.5 * r * x * x;
    const double u = x - half;
    const double mu = p.mu();
    const double k = mu * u / p.th_s;
    // ln cosh(k) without overflow
    const double lncosh = std::abs(k) + std::log1p(std::exp(-2.0 * std::abs(k))) - std::log(2.0);
    return 0.5 * r * half * half + r * half * u + r * p.th_s * p.th_s / (mu * mu) * lncosh;
}

} // namespace

void HshPulse::validate() const
{
    std::vector<std::string> items;
    if (!(gamma_hz > 0.0))
        items.push_back("gamma_hz must be positive");
    if (!(th_s > 0.0))
        items.push_back("th_s must be positive");
    if (!(ts_s >= 0.0))
        items.push_back("ts_s must be nonnegative");
    if (!(tc_s > ts_s))
        items.push_back("tc_s must exceed ts_s");
    if (!(rabi_hz >= 0.0))
        items.push_back("rabi_hz must be nonnegative");
    if (!(scale >= 0.0 && scale <= 1.0))
        items.push_back("scale must lie in [0, 1]");
    if (!std::isfinite(phase))
        items.push_back("phase must be finite");
    if (!std::isfinite(center_offset_hz))
        items.push_back("center_offset_hz must be finite");
    if (!items.empty())
        throw config_error("invalid HSH pulse", items);
}

double HshPulse::mu() const { return std::acosh(edge_level) * th_s / ramp_half_width(*this); }

double HshPulse::chirp_rate() const
{
    const double m = mu();
    const double tail = th_s / m * std::tanh(m * ramp_half_width(*this) / th_s);
    return gamma_hz / (ts_s + 2.0 * tail);
}

cplx hsh_envelope(const HshPulse& p, double t)
{
    const double x = std::abs(t);
    if (x > 0.5 * p.tc_s || p.scale == 0.0)
        return 0.0;
    double amp = two_pi * p.rabi_hz * p.scale;
    if (x > 0.5 * p.ts_s)
        amp /= std::cosh(p.mu() * (x - 0.5 * p.ts_s) / p.th_s);
    const double cycles = p.center_offset_hz * t + even_phase(p, x);
    return std::polar(amp, p.phase + two_pi * cycles);
}

double hsh_frequency(const HshPulse& p, double t)
{
    const double x = std::abs(t);
    if (x > 0.5 * p.tc_s)
        return 0.0;
    const double r = p.chirp_rate();
    double g = r * x;
    if (x > 0.5 * p.ts_s) {
        const double mu = p.mu();
        g = r * 0.5 * p.ts_s + r * p.th_s / mu * std::tanh(mu * (x - 0.5 * p.ts_s) / p.th_s);
    }
    return p.center_offset_hz + (t < 0.0 ? -g : g);
}

cplx chsh_envelope(const ChshPulse& p, double t)
{
    cplx acc = 0.0;
    for (std::size_t n = 0; n < 3; ++n) {
        if (p.scales[n] == 0.0)
            continue;
        acc += p.scales[n] * std::polar(1.0, p.phases[n]) *
               hsh_envelope(p.shape, t + static_cast<double>(n) * p.tau_s);
    }
    return acc;
}

double default_pulse_dt(const HshPulse& p)
{
    return 1.0 / (default_samples_per_period * (p.gamma_hz + p.rabi_hz));
}

void check_pulse_sampling(const HshPulse& p, double dt)
{
    const double limit = 1.0 / (2.0 * (p.gamma_hz + p.rabi_hz));
    if (!(dt > 0.0) || dt > limit) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "time step %.3g s cannot resolve Gamma + Omega (needs <= %.3g s)",
                      dt, limit);
        throw config_error("under-sampled pulse grid", {buf});
    }
}

std::vector<cplx> chsh_compose(const ChshPulse& p, double center, const TimeGrid& grid)
{
    if (!(p.tau_s >= 0.0))
        throw argument_error("composite delay must be nonnegative");
    p.shape.validate();
    check_pulse_sampling(p.shape, grid.dt);
    std::vector<cplx> out(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k)
        out[k] = chsh_envelope(p, grid.at(k) - center);
    return out;
}

cplx gaussian_train_at(const BinTrain& train, double t)
{
    const double rel = t - train.t_start;
    if (rel < 0.0)
        return 0.0;
    const auto bin = static_cast<std::size_t>(rel / train.tau_s);
    if (bin >= train.amplitudes.size() || train.amplitudes[bin] == cplx{})
        return 0.0;
    const double x = rel - (static_cast<double>(bin) + 0.5) * train.tau_s;
    const double f = train.fwhm();
    return train.peak_rabi * train.amplitudes[bin] * std::exp(-2.0 * std::log(2.0) * x * x / (f * f));
}

std::vector<cplx> gaussian_train(const BinTrain& train, const TimeGrid& grid)
{
    if (!(train.tau_s > 0.0))
        throw argument_error("bin width must be positive");
    std::vector<cplx> out(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k)
        out[k] = gaussian_train_at(train, grid.at(k));
    return out;
}

std::string waveform_csv(const std::vector<cplx>& samples, const TimeGrid& grid)
{
    std::ostringstream os;
    os << "t_s,re,im\n";
    char buf[128];
    for (std::size_t k = 0; k < samples.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.9e,%.9e,%.9e\n", grid.at(k), samples[k].real(),
                      samples[k].imag());
        os << buf;
    }
    return os.str();
}

} // namespace pra
