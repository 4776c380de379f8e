#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "pra/effective_model.hpp"
#include "pra/errors.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace pra;
using std::numbers::pi;

namespace {

const double p_mub1 = (3.0 - std::sqrt(3.0)) / 6.0;

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

} // namespace

TEST_CASE("pulse operator")
{
    auto id = pulse_operator(ReadoutPulse(0.0, 1.3));
    CHECK(close(id[0][0], 1.0, 1e-15));
    CHECK(close(id[0][1], 0.0, 1e-15));
    CHECK(close(id[1][0], 0.0, 1e-15));
    CHECK(close(id[1][1], 1.0, 1e-15));

    auto flip = pulse_operator(ReadoutPulse(1.0, 0.0));
    CHECK(close(flip[0][0], 0.0, 1e-15));
    CHECK(close(flip[0][1], 1.0, 1e-15));
    CHECK(close(flip[1][0], -1.0, 1e-15));

    ReadoutPulse half(0.5, pi / 2);
    CHECK(half.a() == doctest::Approx(0.70711).epsilon(1e-5));
    CHECK(close(half.b(), cplx(0.0, 0.70711), 1e-5));

    // M^dagger M = Id
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n = 0; n < 100; ++n) {
        auto m = pulse_operator(ReadoutPulse(u(rng), 6.0 * u(rng) - 3.0));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                cplx acc = std::conj(m[0][i]) * m[0][j] + std::conj(m[1][i]) * m[1][j];
                CHECK(close(acc, i == j ? 1.0 : 0.0, 1e-15));
            }
    }
}

TEST_CASE("readout pulse validation")
{
    CHECK_THROWS_AS(ReadoutPulse(-0.1, 0.0), argument_error);
    CHECK_THROWS_AS(ReadoutPulse(1.1, 0.0), argument_error);
    CHECK_THROWS_AS(ReadoutPulse(0.5, std::nan("")), argument_error);
}

TEST_CASE("delay operator shifts spin coherence only")
{
    const auto b = delay_operator();
    REQUIRE(b.ss().size() == 2);
    CHECK(b.ss()[0] == cplx(0.0));
    CHECK(b.ss()[1] == cplx(1.0));
    CHECK(b.ee().size() == 1);
    CHECK(b.ee()[0] == cplx(1.0));
    const auto bb = b * b;
    REQUIRE(bb.ss().size() == 3);
    CHECK(bb.ss()[2] == cplx(1.0));
    CHECK(bb.ss()[0] == cplx(0.0));
    CHECK(bb.ss()[1] == cplx(0.0));
}

TEST_CASE("compose analyzer")
{
    SUBCASE("all pulses idle")
    {
        std::array<ReadoutPulse, 3> p{ReadoutPulse(0, 0), ReadoutPulse(0, 0), ReadoutPulse(0, 0)};
        const auto u = compose_analyzer(p);
        for (auto c : u.es())
            CHECK(std::abs(c) == 0.0);
    }
    SUBCASE("optimal row")
    {
        std::array<ReadoutPulse, 3> p{ReadoutPulse(0.5, 0), ReadoutPulse(0.2, pi / 2),
                                      ReadoutPulse(0.5, 0)};
        const auto z = bright_amplitudes(compose_analyzer(p)).zeta;
        CHECK(close(z[0], -0.44721, 1e-5));
        CHECK(close(z[1], cplx(0.0, 0.44721), 1e-5));
        CHECK(close(z[2], -0.44721, 1e-5));
    }
    SUBCASE("MUB-1 row 1")
    {
        std::array<ReadoutPulse, 3> p{ReadoutPulse(p_mub1, 0), ReadoutPulse(1.0 / 3.0, 0),
                                      ReadoutPulse(p_mub1, 0)};
        const auto z = bright_amplitudes(compose_analyzer(p)).zeta;
        for (auto c : z)
            CHECK(close(c, -1.0 / 3.0, 1e-12));
    }
    SUBCASE("arity")
    {
        std::vector<ReadoutPulse> none;
        CHECK_THROWS_AS(compose_analyzer(none), argument_error);
        std::vector<ReadoutPulse> nine(9, ReadoutPulse(0.3, 0.1));
        CHECK_THROWS_AS(compose_analyzer(nine), argument_error);
    }
    SUBCASE("bright degree bounded by pulse count")
    {
        for (std::size_t n = 1; n <= 8; ++n) {
            std::vector<ReadoutPulse> p(n, ReadoutPulse(0.4, 0.7));
            const auto u = compose_analyzer(p);
            CHECK(u.es().size() <= n);
            CHECK(u.ss().size() <= n);
            CHECK(unitarity_residual(u) < 1e-12);
        }
    }
}

TEST_CASE("bright amplitudes")
{
    std::array<ReadoutPulse, 3> last{ReadoutPulse(0, 0), ReadoutPulse(0, 0), ReadoutPulse(1, 0)};
    auto z = bright_amplitudes(last).zeta;
    CHECK(close(z[0], -1.0, 1e-15));
    CHECK(close(z[1], 0.0, 1e-15));
    CHECK(close(z[2], 0.0, 1e-15));

    std::array<ReadoutPulse, 3> first{ReadoutPulse(1, 0), ReadoutPulse(0, 0), ReadoutPulse(0, 0)};
    z = bright_amplitudes(first).zeta;
    CHECK(close(z[0], 0.0, 1e-15));
    CHECK(close(z[2], -1.0, 1e-15));

    // MUB-2 row 1
    std::array<ReadoutPulse, 3> mub2{ReadoutPulse(0.2764, -2 * pi / 3),
                                     ReadoutPulse(0.2857, -0.388),
                                     ReadoutPulse(0.2764, 0.0)};
    CHECK(bright_amplitudes(mub2).total_weight() == doctest::Approx(0.4286).epsilon(1e-3));

    std::vector<ReadoutPulse> two(2, ReadoutPulse(0.5, 0.0));
    CHECK_THROWS_AS(bright_amplitudes(std::span<const ReadoutPulse>(two)), argument_error);
    CHECK_THROWS_AS(bright_amplitudes(compose_analyzer(two)), argument_error);
}

TEST_CASE("closed form matches the truncated matrix oracle")
{
    std::mt19937_64 rng(2024);
    for (int n = 0; n < 1000; ++n) {
        const auto p = oracle::random_triple(rng);
        const auto closed = bright_amplitudes(p).zeta;
        const auto composed = bright_amplitudes(compose_analyzer(p)).zeta;
        const auto matrix = oracle::bright_by_matrix(p, 8);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(std::abs(closed[k] - matrix[k]) < 1e-13);
            CHECK(std::abs(composed[k] - closed[k]) < 1e-14);
        }
        CHECK(bright_amplitudes(p).total_weight() <= 1.0 + 1e-12);
        CHECK(unitarity_residual(compose_analyzer(p)) < 1e-12);
        CHECK(compose_analyzer(p).ss().size() <= 3);
    }
}

TEST_CASE("project")
{
    std::array<ReadoutPulse, 3> mub1{ReadoutPulse(p_mub1, 0), ReadoutPulse(1.0 / 3.0, 0),
                                     ReadoutPulse(p_mub1, 0)};
    const double w = 2 * pi / 3;
    const std::array<double, 3> target{0, 0, 0};
    const std::array<double, 3> ortho{0, -w, w};
    CHECK(project(TimeBinState::equal_magnitude(target), mub1) == doctest::Approx(1.0 / 3.0));
    CHECK(project(TimeBinState::equal_magnitude(ortho), mub1) < 1e-15);
    CHECK(project(TimeBinState({1.0, 0.0, 0.0}), mub1) == doctest::Approx(1.0 / 9.0));
    CHECK(std::abs(oracle::project_by_evolution(TimeBinState({1.0, 0.0, 0.0}), mub1) - 1.0 / 9.0) <
          1e-12);

    CHECK_THROWS_AS(project(TimeBinState({1.0, 1.0, 0.0}), mub1), argument_error);
    CHECK_THROWS_AS(project(TimeBinState({1.0, 0.0}), mub1), argument_error);

    std::mt19937_64 rng(99);
    std::normal_distribution<double> g;
    for (int n = 0; n < 300; ++n) {
        const auto p = oracle::random_triple(rng);
        const TimeBinState in =
            TimeBinState({{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}}).normalized();
        const double prob = project(in, p);
        CHECK(std::abs(prob - oracle::project_by_evolution(in, p)) < 1e-12);

        const cplx phase = std::polar(1.0, 6.0 * g(rng));
        std::vector<cplx> rotated(in.amplitudes());
        for (auto& a : rotated)
            a *= phase;
        CHECK(std::abs(project(TimeBinState(rotated), p) - prob) < 1e-14);
    }
}

TEST_CASE("unitarity residual")
{
    CHECK(unitarity_residual(ShiftBlockUnitary({1.0}, {0.0}, {0.0}, {1.0})) == 0.0);
    CHECK(unitarity_residual(ShiftBlockUnitary({2.0}, {0.0}, {0.0}, {1.0})) >= 3.0);
    CHECK(unitarity_residual(delay_operator()) < 1e-15);
}

TEST_CASE("time-bin state")
{
    CHECK_THROWS_AS(TimeBinState(std::vector<cplx>{}), argument_error);
    TimeBinState s({3.0, 4.0});
    CHECK(s.norm() == doctest::Approx(5.0));
    CHECK(s.normalized().is_normalized(1e-12));
    CHECK_THROWS_AS(TimeBinState({0.0, 0.0}).normalized(), argument_error);
}
