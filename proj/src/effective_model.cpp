#include "pra/effective_model.hpp"

#include "pra/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pra {

TimeBinState::TimeBinState(std::vector<cplx> amplitudes, double bin_width_s)
  : m_amplitudes(std::move(amplitudes)), m_bin_width(bin_width_s)
{
    if (m_amplitudes.empty())
        throw argument_error("TimeBinState needs at least one bin");
}

double TimeBinState::norm() const
{
    double acc = 0.0;
    for (const auto& a : m_amplitudes)
        acc += std::norm(a);
    return std::sqrt(acc);
}

bool TimeBinState::is_normalized(double tol) const
{
    return std::abs(norm() - 1.0) <= tol;
}

TimeBinState TimeBinState::normalized() const
{
    const double n = norm();
    if (n == 0.0)
        throw argument_error("cannot normalize the zero state");
    std::vector<cplx> out(m_amplitudes);
    for (auto& a : out)
        a /= n;
    return TimeBinState(std::move(out), m_bin_width);
}

cplx TimeBinState::inner(const TimeBinState& other) const
{
    if (other.size() != size())
        throw argument_error("inner product of states with different bin counts");
    cplx acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        acc += std::conj(m_amplitudes[i]) * other.m_amplitudes[i];
    return acc;
}

TimeBinState TimeBinState::equal_magnitude(std::span<const double> phases)
{
    const double scale = 1.0 / std::sqrt(static_cast<double>(phases.size()));
    std::vector<cplx> amps;
    amps.reserve(phases.size());
    for (double phi : phases)
        amps.push_back(std::polar(scale, phi));
    return TimeBinState(std::move(amps));
}

ReadoutPulse::ReadoutPulse(double transfer_probability, double phase)
  : m_p(transfer_probability), m_theta(phase)
{
    if (!(m_p >= 0.0 && m_p <= 1.0))
        throw argument_error("transfer probability must lie in [0, 1], got " +
                             std::to_string(m_p));
    if (!std::isfinite(m_theta))
        throw argument_error("readout phase must be finite");
}

double ReadoutPulse::a() const { return std::sqrt(1.0 - m_p); }

cplx ReadoutPulse::b() const { return std::polar(std::sqrt(m_p), m_theta); }

SpinMatrix pulse_operator(const ReadoutPulse& pulse)
{
    const cplx a = pulse.a();
    const cplx b = pulse.b();
    return {{{a, b}, {-std::conj(b), a}}};
}

ShiftPolynomial poly_multiply(const ShiftPolynomial& lhs, const ShiftPolynomial& rhs)
{
    if (lhs.empty() || rhs.empty())
        return {};
    ShiftPolynomial out(lhs.size() + rhs.size() - 1, cplx{});
    for (std::size_t i = 0; i < lhs.size(); ++i)
        for (std::size_t j = 0; j < rhs.size(); ++j)
            out[i + j] += lhs[i] * rhs[j];
    return out;
}

ShiftPolynomial poly_add(const ShiftPolynomial& lhs, const ShiftPolynomial& rhs)
{
    ShiftPolynomial out(std::max(lhs.size(), rhs.size()), cplx{});
    for (std::size_t i = 0; i < lhs.size(); ++i)
        out[i] += lhs[i];
    for (std::size_t i = 0; i < rhs.size(); ++i)
        out[i] += rhs[i];
    return out;
}

ShiftBlockUnitary::ShiftBlockUnitary(ShiftPolynomial ss, ShiftPolynomial se,
                                     ShiftPolynomial es, ShiftPolynomial ee,
                                     std::size_t pulse_count)
  : m_entries{std::move(ss), std::move(se), std::move(es), std::move(ee)},
    m_pulse_count(pulse_count)
{}

ShiftBlockUnitary ShiftBlockUnitary::from_pulse(const ReadoutPulse& pulse)
{
    const auto m = pulse_operator(pulse);
    return ShiftBlockUnitary({m[0][0]}, {m[0][1]}, {m[1][0]}, {m[1][1]}, 1);
}

ShiftBlockUnitary ShiftBlockUnitary::operator*(const ShiftBlockUnitary& rhs) const
{
    auto cell = [&](int r, int c) {
        return poly_add(poly_multiply(entry(r, 0), rhs.entry(0, c)),
                        poly_multiply(entry(r, 1), rhs.entry(1, c)));
    };
    return ShiftBlockUnitary(cell(0, 0), cell(0, 1), cell(1, 0), cell(1, 1),
                             m_pulse_count + rhs.m_pulse_count);
}

ShiftBlockUnitary delay_operator()
{
    return ShiftBlockUnitary({0.0, 1.0}, {0.0}, {0.0}, {1.0}, 0);
}

ShiftBlockUnitary compose_analyzer(std::span<const ReadoutPulse> pulses)
{
    if (pulses.empty())
        throw argument_error("compose_analyzer needs at least one pulse");
    if (pulses.size() > max_analyzer_pulses)
        throw argument_error("compose_analyzer supports at most " +
                             std::to_string(max_analyzer_pulses) + " pulses");
    const auto delay = delay_operator();
    ShiftBlockUnitary u = ShiftBlockUnitary::from_pulse(pulses[0]);
    for (std::size_t k = 1; k < pulses.size(); ++k)
        u = ShiftBlockUnitary::from_pulse(pulses[k]) * (delay * u);
    return u;
}

double BrightAmplitudes::total_weight() const
{
    return std::norm(zeta[0]) + std::norm(zeta[1]) + std::norm(zeta[2]);
}

BrightAmplitudes bright_amplitudes(std::span<const ReadoutPulse> pulses)
{
    if (pulses.size() != 3)
        throw argument_error("bright amplitudes are defined for exactly three pulses");
    const double a0 = pulses[0].a(), a1 = pulses[1].a(), a2 = pulses[2].a();
    const cplx b0 = pulses[0].b(), b1 = pulses[1].b(), b2 = pulses[2].b();
    BrightAmplitudes out;
    out.zeta[0] = -a0 * a1 * std::conj(b2);
    out.zeta[1] = -a0 * std::conj(b1) * a2 + std::conj(b0) * b1 * std::conj(b2);
    out.zeta[2] = -std::conj(b0) * a1 * a2;
    return out;
}

BrightAmplitudes bright_amplitudes(const ShiftBlockUnitary& u)
{
    if (u.pulse_count() != 3)
        throw argument_error("bright amplitudes need an analyzer composed of three pulses");
    const auto& es = u.es();
    BrightAmplitudes out;
    for (std::size_t k = 0; k < 3; ++k)
        out.zeta[2 - k] = k < es.size() ? es[k] : cplx{};
    return out;
}

cplx bright_output_amplitude(const ShiftBlockUnitary& u, const TimeBinState& input,
                             std::size_t bin)
{
    const auto& es = u.es();
    cplx acc = 0.0;
    for (std::size_t i = 0; i < input.size() && i <= bin; ++i) {
        const std::size_t k = bin - i;
        if (k < es.size())
            acc += es[k] * input[i];
    }
    return acc;
}

double project(const TimeBinState& input, std::span<const ReadoutPulse> pulses)
{
    if (pulses.size() != 3)
        throw argument_error("projection needs exactly three readout pulses");
    if (input.size() != 3)
        throw argument_error("projection input must span three time bins");
    if (!input.is_normalized())
        throw argument_error("projection input is not normalized (norm " +
                             std::to_string(input.norm()) + ")");
    const auto u = compose_analyzer(pulses);
    return std::norm(bright_output_amplitude(u, input, pulses.size() - 1));
}

namespace {

// Coefficients of p(C)^dagger q(C) as a Laurent polynomial, index offset by
// `offset` so that index `offset` holds the C^0 term.
std::vector<cplx> adjoint_product(const ShiftPolynomial& p, const ShiftPolynomial& q,
                                  std::size_t offset)
{
    std::vector<cplx> out(2 * offset + 1, cplx{});
    for (std::size_t a = 0; a < p.size(); ++a)
        for (std::size_t b = 0; b < q.size(); ++b) {
            const auto power = static_cast<std::ptrdiff_t>(b) - static_cast<std::ptrdiff_t>(a);
            out[static_cast<std::size_t>(power + static_cast<std::ptrdiff_t>(offset))] +=
                std::conj(p[a]) * q[b];
        }
    return out;
}

} // namespace

double unitarity_residual(const ShiftBlockUnitary& u)
{
    std::size_t degree = 0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            degree = std::max(degree, u.entry(r, c).size());
    const std::size_t offset = degree;

    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            auto acc = adjoint_product(u.entry(0, i), u.entry(0, j), offset);
            const auto lower = adjoint_product(u.entry(1, i), u.entry(1, j), offset);
            for (std::size_t k = 0; k < acc.size(); ++k) {
                acc[k] += lower[k];
                const cplx target = (i == j && k == offset) ? cplx{1.0} : cplx{};
                worst = std::max(worst, std::abs(acc[k] - target));
            }
        }
    return worst;
}

} // namespace pra
