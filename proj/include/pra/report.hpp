#pragma once

// CSV tables and SVG plots of computed results.
//
// Every file is named <stem>_<hash>.<ext>, where hash is the first eight hex
// digits of the FNV-1a hash of the file contents, so identical results give
// identical names.

#include "pra/analysis.hpp"
#include "pra/mb_simulator.hpp"
#include "pra/parameter_solver.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pra {

struct Table2Row
{
    std::string basis;
    double eta = 0.0;
    double fidelity = 0.0;
    OverlapMatrix overlap;
};

struct NamedTrace
{
    std::string name;
    FieldTrace trace;
};

struct NamedOverlap
{
    std::string name;
    OverlapMatrix matrix;
};

struct NamedCurves
{
    std::string name;
    std::array<VisibilityCurve, 3> curves;
};

struct ReportContent
{
    std::vector<Table1Row> table1;
    std::vector<Table2Row> table2;
    std::vector<NamedOverlap> overlaps;
    std::vector<NamedCurves> visibility;
    std::vector<NamedTrace> traces;

    bool empty() const;
};

std::uint64_t fnv1a(std::string_view data);

/// "name_xxxxxxxx.ext"
std::string hashed_name(const std::string& stem, const std::string& ext, std::string_view content);

std::string table2_csv(const std::vector<Table2Row>& rows);
std::string overlap_csv(const OverlapMatrix& m);
std::string visibility_csv(const std::array<VisibilityCurve, 3>& curves);

std::string overlap_svg(const std::string& title, const OverlapMatrix& m);
std::string visibility_svg(const std::string& title, const std::array<VisibilityCurve, 3>& curves);
/// Output intensity with the five detection slots shaded; the interference slot is marked.
std::string trace_svg(const std::string& title, const FieldTrace& trace);

/// Writes every non-empty section; returns the written paths. Empty content
/// writes nothing. Throws io_error when `dir` cannot be created or written.
std::vector<std::filesystem::path> emit_report(const ReportContent& content,
                                               const std::filesystem::path& dir);

} // namespace pra
