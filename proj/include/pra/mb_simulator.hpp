#pragma once

// One-dimensional Maxwell-Bloch model of spin-wave storage in an atomic
// frequency comb.
//
// Each (z slice, detuning class) carries pure-state amplitudes (c_g, c_s, c_e)
// in the rotating frame,
//   H = delta |e><e| - (E |e><g| + W^* |e><s| + h.c.) / 2,
// with E the probe (input/echo) on g-e and W the control on s-e, both as Rabi
// frequencies in rad/s. Fields are written in retarded time; the probe obeys
//   dE/dz = i sum_k g_k c_e c_g^*,   z in [0, 1],
// and the control is undepleted. Coupling g_k = d * (class spacing) / pi makes
// the intensity optical depth of a tooth equal to d.

#include "pra/parameter_solver.hpp"
#include "pra/pulse_shaping.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pra {

struct CombConfig
{
    double d = 4.0;
    double bw_hz = 4e6;
    double delta_hz = 40e3;
};

struct InputConfig
{
    std::vector<cplx> amplitudes{1.0 / 1.7320508075688772, 1.0 / 1.7320508075688772,
                                 1.0 / 1.7320508075688772};
    double tau_s = 1.67e-6;
    double width_ratio = 2.38;
    /// Peak probe Rabi frequency / 2 pi of a unit amplitude, Hz.
    double peak_rabi_hz = 1e3;
};

struct GridConfig
{
    /// 0 selects 1 / (50 max(BW, Gamma, Omega)).
    double dt_s = 0.0;
    int nz = 50;
    int ndelta = 1000;
};

struct SimulationConfig
{
    CombConfig comb;
    InputConfig input;
    HshPulse write;
    HshPulse read;
    GridConfig grids;
    /// Logical spin storage time; evolution is frozen so it only enters metadata.
    double spin_wait_s = 0.0;

    /// Throws config_error with itemised diagnostics.
    void validate() const;
    /// dt after resolving the default.
    double time_step() const;
};

struct CombProfile
{
    double d = 0.0;
    double bw_hz = 0.0;
    double delta_hz = 0.0;
    double finesse = 0.0;
    double tooth_width_hz = 0.0;
    int teeth = 0;
    int classes_per_tooth = 0;
    /// Class detunings, rad/s.
    std::vector<double> detuning;
    /// Coupling g_k per class, 1/s.
    std::vector<double> weight;

    double t_afc() const { return 1.0 / delta_hz; }
};

/// pi / arctan(2 pi / d)
double comb_finesse(double d);

CombProfile build_comb(double d, double bw_hz, double delta_hz, int ndelta = 1000);

/// (d/F)^2 e^{-d/F} sinc^2(pi/F)
double afc_theory_efficiency(double d, double finesse);

/// Key times of the storage sequence, all in seconds from the start of bin 0.
struct Timeline
{
    double tau = 0.0;
    double write_center = 0.0;
    double write_end = 0.0;
    /// Centre of the first read component.
    double read_center = 0.0;
    double t_afc = 0.0;
    double end = 0.0;

    /// Centre of output slot j (input bin i read by component k lands in i + k).
    double slot_center(int j) const;
    static constexpr int slots = 5;
    static constexpr int interference_slot = 2;
};

Timeline make_timeline(const SimulationConfig& cfg);

struct FieldTrace
{
    TimeGrid grid;
    /// Output probe envelope at z = 1, rad/s.
    std::vector<cplx> envelope;
    double tau = 0.0;
    std::array<double, Timeline::slots> slot_centers{};

    /// Integral of |E|^2 over [t0, t1).
    double energy(double t0, double t1) const;
    double slot_energy(int j) const;
    double peak_intensity() const;
};

/// CSV with columns t_s,re,im,intensity.
std::string field_trace_csv(const FieldTrace& trace);

/// Snapshot of the medium after input absorption, write pulse and coherence zeroing.
struct MediumState
{
    int nz = 0;
    std::size_t nclass = 0;
    // SoA blocks, cell-major: index = cell * nclass + class
    std::vector<double> cg_re, cg_im, cs_re, cs_im, ce_re, ce_im;

    double spin_population() const;
    /// max over classes of | |c_g|^2 + |c_s|^2 + |c_e|^2 - 1 |
    double max_norm_drift() const;
};

struct StoredMedium
{
    std::vector<cplx> amplitudes;
    MediumState state;
    /// Output during input and write (transmitted light), on the full-run grid.
    std::vector<cplx> early_output;
    double input_energy = 0.0;
    /// Largest class norm deviation before zeroing optical coherence.
    double norm_drift = 0.0;
};

struct StorageResult
{
    FieldTrace trace;
    double input_energy = 0.0;
    double echo_energy = 0.0;
    double eta0 = 0.0;
    /// Energy leaving the medium before the write ends, over input energy.
    double transmitted_fraction = 0.0;
    double max_norm_drift = 0.0;
    std::array<double, Timeline::slots> slot_energies{};
};

/// Measured map from component amplitude scale to spin-to-optical transfer.
class TransferCalibration
{
public:
    TransferCalibration() = default;
    /// Throws calibration_error when the map decreases by more than tolerance.
    TransferCalibration(std::vector<double> scales, std::vector<double> transfer,
                        double monotone_tolerance = 1e-4);

    const std::vector<double>& scales() const { return m_scales; }
    const std::vector<double>& transfer() const { return m_transfer; }
    double max_transfer() const { return m_transfer.empty() ? 0.0 : m_transfer.back(); }

    /// Monotone cubic (PCHIP) interpolation of P(scale).
    double transfer_at(double scale) const;
    /// Inverse of transfer_at; requests above the calibrated maximum are clamped.
    double scale_for(double transfer) const;

private:
    std::vector<double> m_scales;
    std::vector<double> m_transfer;
    std::vector<double> m_slopes;
};

struct PraResult
{
    FieldTrace trace;
    std::array<double, Timeline::slots> slot_energies{};
    double interference_energy = 0.0;
    double input_energy = 0.0;
    std::array<double, 3> scales{};
    double max_norm_drift = 0.0;
};

struct BasisSimulation
{
    /// overlap[j][i]: analyzer j, input i, interference energy / (eta0_i * input energy)
    std::array<std::array<double, 3>, 3> overlap{};
    std::array<double, 3> eta0{};
    double mean_efficiency = 0.0;
    double fidelity = 0.0;
    double max_norm_drift = 0.0;
};

/// Owns a configuration, its comb and a cache of stored media keyed by input.
/// Stored media are computed once and reused by every read-out.
class StorageSession
{
public:
    explicit StorageSession(SimulationConfig cfg);
    ~StorageSession();
    StorageSession(const StorageSession&) = delete;
    StorageSession& operator=(const StorageSession&) = delete;

    const SimulationConfig& config() const { return m_cfg; }
    const CombProfile& comb() const { return m_comb; }
    const Timeline& timeline() const { return m_timeline; }
    TimeGrid grid() const;

    /// Input absorption and write; cached per amplitude vector.
    std::shared_ptr<const StoredMedium> store(const std::vector<cplx>& amplitudes);

    /// Read-out with an arbitrary composite; `center` is the composite centre.
    PraResult read(const StoredMedium& medium, const ChshPulse& pulse, double center) const;

    /// Full read with the configured read pulse.
    StorageResult run_storage(const std::vector<cplx>& amplitudes, bool with_read = true);

    /// Measures P(scale) on the given grid, reading a single-bin input.
    TransferCalibration calibrate_transfer(std::span<const double> scales);
    TransferCalibration calibrate_transfer(int points = 41);

    /// Measured spin-to-optical transfer of a single read component of this scale.
    double measure_transfer(double scale);

    PraResult run_pra(const std::vector<cplx>& amplitudes, const SolverResult& analyzer,
                      const TransferCalibration& calibration);

    /// All nine input/analyzer pairs of a basis; `threads` workers over runs.
    BasisSimulation simulate_basis(const Basis& inputs, const std::array<SolverResult, 3>& analyzers,
                                   const TransferCalibration& calibration, int threads = 1);

private:
    struct Cache;
    SimulationConfig m_cfg;
    CombProfile m_comb;
    Timeline m_timeline;
    std::unique_ptr<Cache> m_cache;
};

/// Convenience wrappers using a fresh session.
StorageResult run_storage(const SimulationConfig& cfg);
TransferCalibration calibrate_transfer(const SimulationConfig& cfg, int points = 41);

/// Composite for an analyzer: pulse k (component 2 - k) centred at read_center + k tau.
ChshPulse analyzer_composite(const HshPulse& shape, const SolverResult& analyzer,
                             const TransferCalibration& calibration, double tau);

/// Thread count from PRA_THREADS, else hardware concurrency (at least 1).
int default_thread_count();

} // namespace pra
