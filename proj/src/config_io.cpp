#include "pra/config_io.hpp"

#include "pra/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace pra {

using nlohmann::json;

namespace {

class Reader
{
public:
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    // Returns the object at `key` or nullptr if absent or not an object.
    const json* section(const json& root, const std::string& key, bool warn_missing)
    {
        if (!root.contains(key)) {
            if (warn_missing)
                warnings.push_back("section '" + key + "' missing; using defaults");
            return nullptr;
        }
        const json& s = root.at(key);
        if (!s.is_object()) {
            errors.push_back(key + ": expected an object");
            return nullptr;
        }
        return &s;
    }

    void known_keys(const json& obj, const std::string& where, const std::set<std::string>& keys)
    {
        for (const auto& [k, v] : obj.items())
            if (!keys.count(k))
                errors.push_back(where + (where.empty() ? "" : ".") + k + ": unknown key");
    }

    void number(const json* obj, const std::string& where, const char* key, double& out)
    {
        if (!obj || !obj->contains(key))
            return;
        const json& v = obj->at(key);
        if (!v.is_number())
            errors.push_back(where + "." + key + ": expected a number");
        else
            out = v.get<double>();
    }

    void integer(const json* obj, const std::string& where, const char* key, int& out)
    {
        if (!obj || !obj->contains(key))
            return;
        const json& v = obj->at(key);
        if (!v.is_number_integer())
            errors.push_back(where + "." + key + ": expected an integer");
        else
            out = v.get<int>();
    }

    std::optional<std::vector<double>> array(const json* obj, const std::string& where,
                                             const char* key)
    {
        if (!obj || !obj->contains(key))
            return std::nullopt;
        const json& v = obj->at(key);
        if (!v.is_array()) {
            errors.push_back(where + "." + key + ": expected an array of numbers");
            return std::nullopt;
        }
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) {
                errors.push_back(where + "." + key + ": expected an array of numbers");
                return std::nullopt;
            }
            out.push_back(x.get<double>());
        }
        return out;
    }

    void pulse(const json& root, const char* name, HshPulse& p)
    {
        const json* s = section(root, name, false);
        if (!s)
            return;
        known_keys(*s, name,
                   {"gamma_hz", "th_s", "ts_s", "tc_s", "rabi_hz", "phase", "scale",
                    "center_offset_hz"});
        number(s, name, "gamma_hz", p.gamma_hz);
        number(s, name, "th_s", p.th_s);
        number(s, name, "ts_s", p.ts_s);
        number(s, name, "tc_s", p.tc_s);
        number(s, name, "rabi_hz", p.rabi_hz);
        number(s, name, "phase", p.phase);
        number(s, name, "scale", p.scale);
        number(s, name, "center_offset_hz", p.center_offset_hz);
    }
};

json pulse_json(const HshPulse& p)
{
    return {{"gamma_hz", p.gamma_hz}, {"th_s", p.th_s},       {"ts_s", p.ts_s},
            {"tc_s", p.tc_s},         {"rabi_hz", p.rabi_hz}, {"phase", p.phase},
            {"scale", p.scale},       {"center_offset_hz", p.center_offset_hz}};
}

} // namespace

LoadedConfig parse_config(const std::string& json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error("malformed JSON", {e.what()});
    }
    if (!root.is_object())
        throw config_error("invalid config", {"top level must be an object"});

    LoadedConfig out;
    auto& cfg = out.config;
    Reader r;
    r.known_keys(root, "", {"comb", "input", "write", "read", "grids", "spin_wait_s"});

    if (const json* s = r.section(root, "comb", false)) {
        r.known_keys(*s, "comb", {"d", "bw_hz", "delta_hz"});
        r.number(s, "comb", "d", cfg.comb.d);
        r.number(s, "comb", "bw_hz", cfg.comb.bw_hz);
        r.number(s, "comb", "delta_hz", cfg.comb.delta_hz);
    }
    if (const json* s = r.section(root, "input", false)) {
        r.known_keys(*s, "input", {"amps_re", "amps_im", "tau_s", "width_ratio", "peak_rabi_hz"});
        const auto re = r.array(s, "input", "amps_re");
        const auto im = r.array(s, "input", "amps_im");
        if (im && !re)
            r.errors.push_back("input.amps_im given without input.amps_re");
        if (re) {
            std::vector<double> imag = im ? *im : std::vector<double>(re->size(), 0.0);
            if (imag.size() != re->size()) {
                r.errors.push_back("input.amps_re and input.amps_im differ in length");
            } else {
                cfg.input.amplitudes.clear();
                for (std::size_t k = 0; k < re->size(); ++k)
                    cfg.input.amplitudes.emplace_back((*re)[k], imag[k]);
            }
        }
        r.number(s, "input", "tau_s", cfg.input.tau_s);
        r.number(s, "input", "width_ratio", cfg.input.width_ratio);
        r.number(s, "input", "peak_rabi_hz", cfg.input.peak_rabi_hz);
    }
    r.pulse(root, "write", cfg.write);
    r.pulse(root, "read", cfg.read);
    if (const json* s = r.section(root, "grids", true)) {
        r.known_keys(*s, "grids", {"dt_s", "nz", "ndelta"});
        r.number(s, "grids", "dt_s", cfg.grids.dt_s);
        r.integer(s, "grids", "nz", cfg.grids.nz);
        r.integer(s, "grids", "ndelta", cfg.grids.ndelta);
    }
    r.number(&root, "", "spin_wait_s", cfg.spin_wait_s);

    if (r.errors.empty()) {
        try {
            cfg.validate();
        } catch (const config_error& e) {
            r.errors.insert(r.errors.end(), e.items().begin(), e.items().end());
        }
    }
    if (!r.errors.empty())
        throw config_error("invalid config", r.errors);
    out.warnings = std::move(r.warnings);
    return out;
}

LoadedConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot read config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const SimulationConfig& cfg)
{
    json re = json::array(), im = json::array();
    for (const auto& a : cfg.input.amplitudes) {
        re.push_back(a.real());
        im.push_back(a.imag());
    }
    const json j = {
        {"comb", {{"d", cfg.comb.d}, {"bw_hz", cfg.comb.bw_hz}, {"delta_hz", cfg.comb.delta_hz}}},
        {"input",
         {{"amps_re", re},
          {"amps_im", im},
          {"tau_s", cfg.input.tau_s},
          {"width_ratio", cfg.input.width_ratio},
          {"peak_rabi_hz", cfg.input.peak_rabi_hz}}},
        {"write", pulse_json(cfg.write)},
        {"read", pulse_json(cfg.read)},
        {"grids", {{"dt_s", cfg.grids.dt_s}, {"nz", cfg.grids.nz}, {"ndelta", cfg.grids.ndelta}}},
        {"spin_wait_s", cfg.spin_wait_s}};
    return j.dump(2) + "\n";
}

std::string summary_json(const RunSummary& s)
{
    json j = {{"eta0", s.eta0}, {"bin_energies", s.bin_energies}};
    if (s.eta)
        j["eta"] = *s.eta;
    if (s.fidelity)
        j["fidelity"] = *s.fidelity;
    return j.dump(2) + "\n";
}

} // namespace pra
