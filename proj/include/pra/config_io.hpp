#pragma once

// JSON form of SimulationConfig.
//
//   {
//     "comb":  {"d": 4, "bw_hz": 4e6, "delta_hz": 40e3},
//     "input": {"amps_re": [...], "amps_im": [...], "tau_s": 1.67e-6,
//               "width_ratio": 2.38, "peak_rabi_hz": 1e3},
//     "write": {"gamma_hz", "th_s", "ts_s", "tc_s", "rabi_hz", "phase", "scale",
//               "center_offset_hz"},
//     "read":  {same keys as write},
//     "grids": {"dt_s": 0, "nz": 50, "ndelta": 1000},
//     "spin_wait_s": 0
//   }
//
// Every key is optional and falls back to the built-in default. Unknown keys
// and wrongly typed values are errors.

#include "pra/mb_simulator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pra {

struct LoadedConfig
{
    SimulationConfig config;
    std::vector<std::string> warnings;
};

/// Parses and validates; config_error lists every problem found.
LoadedConfig parse_config(const std::string& json_text);

/// io_error when the file cannot be read.
LoadedConfig load_config(const std::filesystem::path& path);

std::string config_to_json(const SimulationConfig& cfg);

struct RunSummary
{
    double eta0 = 0.0;
    std::vector<double> bin_energies;
    std::optional<double> eta;
    std::optional<double> fidelity;
};

std::string summary_json(const RunSummary& s);

} // namespace pra
