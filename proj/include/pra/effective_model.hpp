#pragma once

// Exact algebra of the partial-readout analyzer.
//
// The memory is modelled on H_t (x) H_s where H_t is the semi-infinite chain of
// time bins and H_s = {|s>, |e>}. A readout pulse acts on H_s only; free
// evolution over one bin delays spin coherence by one bin (shift C_t) and
// leaves optical coherence untouched. Every operator built from these is a
// 2x2 block matrix whose entries are polynomials in C_t.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pra {

using cplx = std::complex<double>;

/// Tolerance used for "is normalized" checks on caller-provided states.
inline constexpr double input_norm_tolerance = 1e-6;

class TimeBinState
{
public:
    explicit TimeBinState(std::vector<cplx> amplitudes, double bin_width_s = 0.0);

    std::size_t size() const { return m_amplitudes.size(); }
    const std::vector<cplx>& amplitudes() const { return m_amplitudes; }
    cplx operator[](std::size_t i) const { return m_amplitudes[i]; }
    double bin_width() const { return m_bin_width; }

    double norm() const;
    bool is_normalized(double tol = input_norm_tolerance) const;
    TimeBinState normalized() const;

    /// <this|other>
    cplx inner(const TimeBinState& other) const;

    /// (e^{i phi_0}|0> + ... + e^{i phi_{n-1}}|n-1>) / sqrt(n)
    static TimeBinState equal_magnitude(std::span<const double> phases);

private:
    std::vector<cplx> m_amplitudes;
    double m_bin_width;
};

class ReadoutPulse
{
public:
    ReadoutPulse(double transfer_probability, double phase);

    double transfer_probability() const { return m_p; }
    double phase() const { return m_theta; }

    /// sqrt(1 - P)
    double a() const;
    /// e^{i theta} sqrt(P)
    cplx b() const;

private:
    double m_p;
    double m_theta;
};

/// 2x2 matrix over {s, e}; m[0][1] = <s|A|e>.
using SpinMatrix = std::array<std::array<cplx, 2>, 2>;

/// [[a, b], [-b*, a]]
SpinMatrix pulse_operator(const ReadoutPulse& pulse);

/// Finite polynomial in the bin-shift operator; coefficient k multiplies C_t^k.
using ShiftPolynomial = std::vector<cplx>;

class ShiftBlockUnitary
{
public:
    ShiftBlockUnitary() = default;
    ShiftBlockUnitary(ShiftPolynomial ss, ShiftPolynomial se, ShiftPolynomial es,
                      ShiftPolynomial ee, std::size_t pulse_count = 0);

    /// <s|U|s>: coherence that stays in the spin state (dark port).
    const ShiftPolynomial& ss() const { return m_entries[0]; }
    const ShiftPolynomial& se() const { return m_entries[1]; }
    /// <e|U|s>: spin coherence mapped to the optical transition (bright port).
    const ShiftPolynomial& es() const { return m_entries[2]; }
    const ShiftPolynomial& ee() const { return m_entries[3]; }

    const ShiftPolynomial& entry(int row, int col) const { return m_entries[2 * row + col]; }

    /// Number of readout pulses this operator was composed from (0 if hand-built).
    std::size_t pulse_count() const { return m_pulse_count; }

    /// Lifts a pulse matrix to a degree-0 block operator.
    static ShiftBlockUnitary from_pulse(const ReadoutPulse& pulse);

    /// this * rhs
    ShiftBlockUnitary operator*(const ShiftBlockUnitary& rhs) const;

private:
    std::array<ShiftPolynomial, 4> m_entries{};
    std::size_t m_pulse_count = 0;
};

/// One bin of free evolution: C_t on |s>, identity on |e>.
ShiftBlockUnitary delay_operator();

inline constexpr std::size_t max_analyzer_pulses = 8;

/// U = A_{n-1} B ... B A_1 B A_0
ShiftBlockUnitary compose_analyzer(std::span<const ReadoutPulse> pulses);

struct BrightAmplitudes
{
    /// zeta_0 multiplies C_t^2, zeta_1 multiplies C_t, zeta_2 multiplies Id.
    std::array<cplx, 3> zeta{};

    double total_weight() const;
};

/// Closed form for three pulses.
BrightAmplitudes bright_amplitudes(std::span<const ReadoutPulse> pulses);

/// Reads the bright-entry coefficients of a three-pulse analyzer.
BrightAmplitudes bright_amplitudes(const ShiftBlockUnitary& u);

/// Probability of a click in the interference bin (bin n-1 for n pulses).
double project(const TimeBinState& input, std::span<const ReadoutPulse> pulses);

/// Complex amplitude in output bin `bin` of the bright port.
cplx bright_output_amplitude(const ShiftBlockUnitary& u, const TimeBinState& input,
                             std::size_t bin);

/// Max absolute coefficient deviation of U^dagger U from the identity,
/// evaluated with C^dagger C = Id on the semi-infinite bin chain.
double unitarity_residual(const ShiftBlockUnitary& u);

ShiftPolynomial poly_multiply(const ShiftPolynomial& lhs, const ShiftPolynomial& rhs);
ShiftPolynomial poly_add(const ShiftPolynomial& lhs, const ShiftPolynomial& rhs);

} // namespace pra
