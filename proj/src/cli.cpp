#include "pra/cli.hpp"

#include "pra/analysis.hpp"
#include "pra/blackbox_bounds.hpp"
#include "pra/config_io.hpp"
#include "pra/errors.hpp"
#include "pra/mb_simulator.hpp"
#include "pra/parameter_solver.hpp"
#include "pra/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <numbers>
#include <ostream>

namespace pra {

namespace {

struct Options
{
    std::string config;
    std::string out;
    std::string phases;
    std::string basis = "optimal";
    std::string plane = "0-1";
    std::string backend = "effective";
    std::string rotation = "0";
    std::uint64_t seed = 1;
    int threads = 0;
    int points = 16;
    int calibration_points = 41;
    int max_support = 8;
    bool simulate = false;
};

std::string fixed(double v, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

SimulationConfig config_from(const Options& o, std::ostream& err)
{
    if (o.config.empty())
        return {};
    auto loaded = load_config(o.config);
    for (const auto& w : loaded.warnings)
        err << "warning: " << w << '\n';
    return loaded.config;
}

int threads_from(const Options& o) { return o.threads > 0 ? o.threads : default_thread_count(); }

void report_written(const std::vector<std::filesystem::path>& paths, std::ostream& err)
{
    for (const auto& p : paths)
        err << "wrote " << p.string() << '\n';
}

int cmd_solve(const Options& o, std::ostream& out)
{
    const auto phi = parse_angle_list(o.phases);
    if (phi.size() != 3)
        throw argument_error("--phases needs exactly three angles");
    const auto r = solve_projector(phi[0], phi[1], phi[2]);
    out << "pulse,P,theta\n";
    for (std::size_t k = 0; k < 3; ++k)
        out << k << ',' << fixed(r.pulses[k].transfer_probability(), 6) << ','
            << fixed(r.pulses[k].phase(), 6) << '\n';
    out << "eta," << fixed(r.eta, 6) << '\n';
    return exit_ok;
}

int cmd_table1(const Options& o, std::ostream& out, std::ostream& err)
{
    const auto rows = build_table1();
    out << table1_csv(rows);
    if (!o.out.empty()) {
        ReportContent c;
        c.table1 = rows;
        report_written(emit_report(c, o.out), err);
    }
    return exit_ok;
}

int cmd_bounds(const Options& o, std::ostream& out, std::ostream& err)
{
    if (o.max_support < 1 || o.max_support > 12)
        throw argument_error("--max-support must lie in [1, 12]");
    out << "generic_bound," << fixed(max_eta_generic(), 9) << '\n';
    std::vector<StructuredBound> rows;
    for (int l = 1; l <= o.max_support; ++l)
        rows.push_back(max_eta_structured(l));
    const std::string csv = bounds_csv(rows);
    out << csv;
    const auto lemma = dark_support_lemma_check(o.max_support, 1000, o.seed);
    out << "support_lemma," << (lemma.passed() ? "pass" : "fail") << ",largest_surviving="
        << lemma.largest_surviving_support << '\n';
    const auto& opt = canonical_mub_set().optimal;
    for (std::size_t j = 0; j < 3; ++j) {
        const auto a = check_attainment(solve_projector(opt[j]));
        char buf[200];
        std::snprintf(buf, sizeof buf, "attainment,%zu,eta=%.9f,res1=%.2e,res2=%.2e\n", j, a.eta,
                      a.residual_shift1, a.residual_shift2);
        out << buf;
    }
    if (!o.out.empty()) {
        std::filesystem::create_directories(o.out);
        const auto path = std::filesystem::path(o.out) / hashed_name("bounds", "csv", csv);
        std::ofstream f(path);
        if (!(f << csv))
            throw io_error("cannot write " + path.string());
        err << "wrote " << path.string() << '\n';
    }
    return exit_ok;
}

Table2Row simulate_table2(StorageSession& session, const std::string& name,
                          const TransferCalibration& cal, int threads)
{
    const auto set = canonical_mub_set();
    const auto& basis = basis_by_name(set, name);
    const auto sim = session.simulate_basis(basis, solve_basis(basis), cal, threads);
    return {name, sim.mean_efficiency, sim.fidelity, OverlapMatrix::from(sim)};
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err)
{
    StorageSession session(config_from(o, err));
    const auto storage = session.run_storage(session.config().input.amplitudes);
    RunSummary summary;
    summary.eta0 = storage.eta0;
    for (double e : storage.slot_energies)
        summary.bin_energies.push_back(e / storage.input_energy);

    ReportContent content;
    content.traces.push_back({"storage", storage.trace});
    if (!o.basis.empty() && o.basis != "none") {
        const auto cal = session.calibrate_transfer(o.calibration_points);
        const auto row = simulate_table2(session, o.basis, cal, threads_from(o));
        summary.eta = row.eta;
        summary.fidelity = row.fidelity;
        content.table2.push_back(row);
    }
    out << summary_json(summary);
    if (!o.out.empty())
        report_written(emit_report(content, o.out), err);
    return exit_ok;
}

int cmd_visibility(const Options& o, std::ostream& out, std::ostream& err)
{
    const auto set = canonical_mub_set();
    const auto& basis = basis_by_name(set, o.basis);
    const Plane plane = parse_plane(o.plane);
    if (o.points < 8)
        throw argument_error("--points must be at least 8");
    const auto phis = phi_grid(o.points);

    std::array<VisibilityCurve, 3> curves;
    if (o.backend == "effective") {
        curves = visibility_scan(basis, plane, phis, effective_backend(basis));
    } else if (o.backend == "synthetic") {
        const double eta = solve_basis(basis)[0].eta;
        curves = visibility_scan(basis, plane, phis,
                                 rotated_backend(basis, plane, parse_angle(o.rotation), eta));
    } else if (o.backend == "simulation") {
        StorageSession session(config_from(o, err));
        const auto cal = session.calibrate_transfer(o.calibration_points);
        curves = visibility_scan(basis, plane, phis, simulation_backend(session, basis, cal));
    } else {
        throw argument_error("unknown backend '" + o.backend + "'");
    }
    out << "projector,amplitude,offset_rad,offset_deg,mean,residual\n";
    for (const auto& c : curves)
        out << c.projector << ',' << fixed(c.fit.amplitude, 6) << ','
            << (c.fit.offset_defined ? fixed(c.fit.offset, 6) : "nan") << ','
            << (c.fit.offset_defined ? fixed(c.fit.offset * 180 / std::numbers::pi, 3) : "nan")
            << ',' << fixed(c.fit.mean, 6) << ',' << c.fit.residual << '\n';
    if (!o.out.empty()) {
        ReportContent content;
        content.visibility.push_back({o.basis + "_" + to_string(plane) + "_" + o.backend, curves});
        report_written(emit_report(content, o.out), err);
    }
    return exit_ok;
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err)
{
    if (o.out.empty())
        throw argument_error("report needs --out");
    ReportContent content;
    content.table1 = build_table1();
    const auto set = canonical_mub_set();
    for (const char* name : {"mub1", "mub2", "mub3", "optimal"}) {
        const auto& basis = basis_by_name(set, name);
        const auto m = effective_overlap(basis, solve_basis(basis));
        content.overlaps.push_back({std::string(name) + "_effective", m});
        for (Plane p : {Plane::p01, Plane::p02})
            content.visibility.push_back(
                {std::string(name) + "_" + to_string(p) + "_effective",
                 visibility_scan(basis, p, phi_grid(o.points), effective_backend(basis))});
    }
    if (o.simulate) {
        StorageSession session(config_from(o, err));
        const auto cal = session.calibrate_transfer(o.calibration_points);
        for (const char* name : {"mub1", "mub2", "mub3", "optimal"})
            content.table2.push_back(simulate_table2(session, name, cal, threads_from(o)));
        const auto& opt = set.optimal;
        const auto an = solve_basis(opt);
        content.traces.push_back(
            {"optimal_matched", session.run_pra(opt[0].amplitudes(), an[0], cal).trace});
        content.traces.push_back(
            {"optimal_orthogonal", session.run_pra(opt[1].amplitudes(), an[0], cal).trace});
        out << table2_csv(content.table2);
    }
    const auto written = emit_report(content, o.out);
    report_written(written, err);
    out << written.size() << " files written to " << o.out << '\n';
    return exit_ok;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Partial-readout analyzer for time-bin qutrits in spin-wave memories"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--seed", o.seed, "RNG seed for randomised checks");
    app.add_option("--threads", o.threads, "Worker threads (default: PRA_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);

    auto* solve = app.add_subcommand("solve", "Pulse parameters for a projector");
    solve->add_option("--phases", o.phases, "Target phases phi0,phi1,phi2 (e.g. 0,2pi/3,-2pi/3)")
        ->required();

    auto* table1 = app.add_subcommand("table1", "Pulse table for all basis vectors");
    table1->add_option("--out", o.out, "Output directory");

    auto* bounds = app.add_subcommand("bounds", "Efficiency bounds for black-box analyzers");
    bounds->add_option("--max-support", o.max_support, "Largest dark-port support length");
    bounds->add_option("--out", o.out, "Output directory");

    auto* simulate = app.add_subcommand("simulate", "Maxwell-Bloch storage and projection run");
    simulate->add_option("--config", o.config, "JSON configuration");
    simulate->add_option("--basis", o.basis, "mub1, mub2, mub3, optimal or none");
    simulate->add_option("--calibration-points", o.calibration_points, "Calibration grid size");
    simulate->add_option("--out", o.out, "Output directory");

    auto* visibility = app.add_subcommand("visibility", "Visibility scan with sinusoid fits");
    visibility->add_option("--basis", o.basis, "mub1, mub2, mub3 or optimal");
    visibility->add_option("--plane", o.plane, "0-1 or 0-2");
    visibility->add_option("--backend", o.backend, "effective, synthetic or simulation");
    visibility->add_option("--rotation", o.rotation, "Analyzer rotation for the synthetic backend");
    visibility->add_option("--points", o.points, "Number of input angles");
    visibility->add_option("--config", o.config, "JSON configuration (simulation backend)");
    visibility->add_option("--calibration-points", o.calibration_points, "Calibration grid size");
    visibility->add_option("--out", o.out, "Output directory");

    auto* report = app.add_subcommand("report", "Write CSV tables and SVG plots");
    report->add_option("--out", o.out, "Output directory")->required();
    report->add_option("--config", o.config, "JSON configuration");
    report->add_flag("--simulate", o.simulate, "Include Maxwell-Bloch basis simulations");
    report->add_option("--points", o.points, "Visibility angles per curve");
    report->add_option("--calibration-points", o.calibration_points, "Calibration grid size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_invalid;
    }

    try {
        if (*solve)
            return cmd_solve(o, out);
        if (*table1)
            return cmd_table1(o, out, err);
        if (*bounds)
            return cmd_bounds(o, out, err);
        if (*simulate)
            return cmd_simulate(o, out, err);
        if (*visibility)
            return cmd_visibility(o, out, err);
        if (*report)
            return cmd_report(o, out, err);
    } catch (const config_error& e) {
        err << "error: " << e.what() << '\n';
        for (const auto& item : e.items())
            err << "  - " << item << '\n';
        return exit_invalid;
    } catch (const numerical_error& e) {
        err << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const argument_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const io_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_invalid;
    }
    return exit_invalid;
}

} // namespace pra
