#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pra/blackbox_bounds.hpp"
#include "pra/errors.hpp"

#include <cmath>
#include <numbers>

using namespace pra;

TEST_CASE("overlap residual")
{
    const double r = 1.0 / std::sqrt(2.0);
    DarkPortProfile flat{{1.0, 0.0}, 0.0};
    CHECK(overlap_residual(0.0, flat, 2) == 0.0);

    DarkPortProfile opt{{r, 0.0, r}, 0.6};
    CHECK(overlap_residual(0.6, opt, 2) < 1e-12);

    // hypothetical unit dark overlap at eta = 3/4
    DarkPortProfile unit{{1.0, 0.0, 1.0}, 0.75};
    CHECK(overlap_residual(0.75, unit, 2) < 1e-12);

    // optimal-basis bright phases cancel the shift-1 bright overlap
    CHECK(overlap_residual(0.6, opt, 1) < 1e-12);
    CHECK(overlap_residual(0.6, opt, 1, BrightPhases{0.0, 0.0}) == doctest::Approx(0.4));

    CHECK_THROWS_AS(overlap_residual(0.5, opt, 3), argument_error);
    CHECK_THROWS_AS(overlap_residual(1.5, opt, 2), argument_error);
}

TEST_CASE("generic bound")
{
    const double eta = max_eta_generic();
    CHECK(std::abs(eta - 0.75) < 1e-6);
    CHECK(std::abs(eta / 3.0 - (1.0 - eta)) < 1e-6);
    CHECK(std::abs(max_eta_generic(0.5) - 0.6) < 1e-6);
    CHECK(max_eta_generic(0.0) == 0.0);
}

TEST_CASE("structured bound")
{
    CHECK(max_eta_structured(1).sup_eta == 0.0);
    CHECK(max_eta_structured(2).sup_eta == 0.0);
    double prev = 1.0;
    for (int L = 3; L <= 8; ++L) {
        const auto b = max_eta_structured(L);
        INFO("L = " << L);
        CHECK(std::abs(b.sup_eta - 0.6) < 0.005);
        CHECK(b.sup_eta <= prev + 1e-12);
        CHECK(b.witness.size() == static_cast<std::size_t>(L));
        double n = 0.0;
        for (double x : b.witness)
            n += x * x;
        CHECK(n == doctest::Approx(1.0));
        prev = b.sup_eta;
    }
    CHECK(std::abs(max_eta_generic() - max_eta_structured(3).sup_eta - 0.15) < 0.01);
    CHECK_THROWS_AS(max_eta_structured(0), argument_error);
    CHECK_THROWS_AS(max_eta_structured(9), argument_error);
}

TEST_CASE("dark support lemma")
{
    const auto report = dark_support_lemma_check(8, 1000, 11);
    CHECK(report.trials == 1000);
    CHECK(report.largest_initial_support == 8);
    CHECK(report.largest_surviving_support == 3);
    CHECK(report.max_single_term_error < 1e-13);
    CHECK(report.passed());

    const std::vector<cplx> single{0.0, 0.0, 1.0, 0.0};
    CHECK(support_length(reduce_dark_support(single)) == 1);

    const auto opt = solve_projector(0.0, std::numbers::pi / 2, 0.0);
    const auto dark = compose_analyzer(opt.pulses).ss();
    CHECK(support_length(dark, 1e-14) <= 3);
    CHECK(reduce_dark_support(dark) == dark);
}

TEST_CASE("optimal analyzer attains the bound")
{
    const auto set = canonical_mub_set();
    for (const auto& v : set.optimal) {
        const auto a = check_attainment(solve_projector(v));
        CHECK(std::abs(a.eta - 0.6) < 1e-9);
        CHECK(a.bright_magnitude_error < 1e-10);
        CHECK(a.dark_norm_error < 1e-10);
        CHECK(a.residual_shift1 < 1e-10);
        CHECK(a.residual_shift2 < 1e-10);
        CHECK(a.residual_shift2_complex < 1e-10);
    }
    // the first optimal vector reproduces the canonical witness phases
    const auto a = check_attainment(solve_projector(set.optimal[0]));
    CHECK(a.phases.phi1 == doctest::Approx(-std::numbers::pi / 2));
    CHECK(a.phases.phi2 == doctest::Approx(0.0));
    CHECK(std::abs(std::abs(a.dark[0]) - 1.0 / std::sqrt(2.0)) < 1e-10);
    CHECK(std::abs(a.dark[1]) < 1e-10);
}

TEST_CASE("csv")
{
    std::vector<StructuredBound> rows{max_eta_structured(3), max_eta_structured(4)};
    const auto csv = bounds_csv(rows);
    CHECK(csv.rfind("L,sup_eta,feasible_patterns,a0,a1,a2,a3\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
