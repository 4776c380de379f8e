#include "pra/blackbox_bounds.hpp"

#include "pra/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

namespace pra {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int grid_points = 200;

// Unit vector of nonnegative magnitudes from m-1 hyperspherical angles in [0, pi/2].
void sphere_point(const double* angles, int m, double* out)
{
    double s = 1.0;
    for (int i = 0; i + 1 < m; ++i) {
        out[i] = s * std::cos(angles[i]);
        s *= std::sin(angles[i]);
    }
    out[m - 1] = s;
}

struct PatternScore
{
    double eta = -1.0;
    std::vector<double> mags;
};

// eta for a real nonnegative profile; -1 when the shift-1 condition cannot be met.
double profile_eta(const std::vector<double>& a)
{
    double c2 = 0.0, c1 = 0.0;
    for (std::size_t k = 0; k + 2 < a.size(); ++k)
        c2 += a[k] * a[k + 2];
    for (std::size_t k = 0; k + 1 < a.size(); ++k)
        c1 += a[k] * a[k + 1];
    // eta/3 = (1-eta) c2 fixes eta; the bright shift-1 overlap is at most 2 eta/3
    // in magnitude, so (1-eta) c1 <= 2 eta/3  <=>  c1 <= 2 c2.
    if (c1 > 2.0 * c2 + 1e-15)
        return -1.0;
    return 3.0 * c2 / (1.0 + 3.0 * c2);
}

PatternScore search_pattern(const std::vector<int>& pattern, int support)
{
    const int m = static_cast<int>(pattern.size());
    PatternScore best;
    std::vector<double> profile(static_cast<std::size_t>(support), 0.0);
    double mags[3];

    auto evaluate = [&](const double* angles) {
        sphere_point(angles, m, mags);
        std::fill(profile.begin(), profile.end(), 0.0);
        for (int i = 0; i < m; ++i)
            profile[static_cast<std::size_t>(pattern[static_cast<std::size_t>(i)])] = mags[i];
        const double eta = profile_eta(profile);
        if (eta > best.eta) {
            best.eta = eta;
            best.mags = profile;
        }
        return eta;
    };

    if (m == 1) {
        const double none[1] = {0.0};
        evaluate(none);
        return best;
    }

    const double half = pi / 2;
    double lo[2] = {0.0, 0.0};
    double width[2] = {half, half};
    double arg_best[2] = {0.0, 0.0};
    for (int pass = 0; pass < 2; ++pass) {
        double best_here = -2.0;
        const int n1 = m >= 3 ? grid_points : 1;
        for (int i = 0; i < grid_points; ++i)
            for (int j = 0; j < n1; ++j) {
                double ang[2];
                ang[0] = std::clamp(lo[0] + width[0] * i / (grid_points - 1), 0.0, half);
                ang[1] = std::clamp(lo[1] + width[1] * j / (grid_points - 1), 0.0, half);
                const double eta = evaluate(ang);
                if (eta > best_here) {
                    best_here = eta;
                    arg_best[0] = ang[0];
                    arg_best[1] = ang[1];
                }
            }
        // refinement window of two coarse steps around the best point
        for (int d = 0; d < 2; ++d) {
            const double step = width[d] / (grid_points - 1);
            lo[d] = arg_best[d] - step;
            width[d] = 2.0 * step;
        }
    }
    return best;
}

} // namespace

cplx dark_autocorrelation(const std::vector<cplx>& a, int shift)
{
    if (shift < 0)
        throw argument_error("autocorrelation shift must be nonnegative");
    cplx acc = 0.0;
    const auto s = static_cast<std::size_t>(shift);
    for (std::size_t k = 0; k + s < a.size(); ++k)
        acc += std::conj(a[k]) * a[k + s];
    return acc;
}

double overlap_residual(double eta, const DarkPortProfile& profile, int shift,
                        const BrightPhases& phases)
{
    if (!(eta >= 0.0 && eta <= 1.0))
        throw argument_error("efficiency must lie in [0, 1]");
    if (shift == 2)
        return std::abs(eta / 3.0 - (1.0 - eta) * std::abs(dark_autocorrelation(profile.a, 2)));
    if (shift == 1) {
        const cplx bright = eta / 3.0 * (std::polar(1.0, phases.phi1) +
                                         std::polar(1.0, phases.phi2 - phases.phi1));
        return std::abs(bright + (1.0 - eta) * dark_autocorrelation(profile.a, 1));
    }
    throw argument_error("overlap residual is defined for shifts 1 and 2");
}

double max_eta_generic(double overlap_cap)
{
    if (!(overlap_cap >= 0.0))
        throw argument_error("overlap cap must be nonnegative");
    auto feasible = [overlap_cap](double eta) { return eta / 3.0 <= (1.0 - eta) * overlap_cap; };
    constexpr int n = 100001;
    double last = 0.0;
    for (int i = 0; i < n; ++i) {
        const double eta = static_cast<double>(i) / (n - 1);
        if (feasible(eta))
            last = eta;
    }
    double lo = last, hi = std::min(1.0, last + 1.0 / (n - 1));
    if (feasible(hi))
        return hi;
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return lo;
}

StructuredBound max_eta_structured(int support)
{
    if (support < 1 || support > 8)
        throw argument_error("structured bound supports dark profiles of length 1..8");
    StructuredBound out;
    out.support = support;
    out.witness.assign(static_cast<std::size_t>(support), 0.0);
    out.witness[0] = 1.0;

    // Nonnegative magnitudes: a shift-l (l >= 3) overlap is a sum of nonnegative
    // products, so it vanishes only if no two nonzero entries are >= 3 apart.
    for (unsigned mask = 1; mask < (1u << support); ++mask) {
        std::vector<int> pattern;
        for (int k = 0; k < support; ++k)
            if (mask & (1u << k))
                pattern.push_back(k);
        if (pattern.back() - pattern.front() > 2)
            continue;
        ++out.feasible_patterns;
        const auto score = search_pattern(pattern, support);
        if (score.eta > out.sup_eta) {
            out.sup_eta = score.eta;
            out.witness = score.mags;
        }
    }
    return out;
}

int support_length(const std::vector<cplx>& a, double tol)
{
    int first = -1, last = -1;
    for (int k = 0; k < static_cast<int>(a.size()); ++k)
        if (std::abs(a[static_cast<std::size_t>(k)]) > tol) {
            if (first < 0)
                first = k;
            last = k;
        }
    return first < 0 ? 0 : last - first + 1;
}

std::vector<cplx> reduce_dark_support(std::vector<cplx> a, double* single_term_error)
{
    double worst = 0.0;
    for (;;) {
        int first = -1, last = -1;
        for (int k = 0; k < static_cast<int>(a.size()); ++k)
            if (a[static_cast<std::size_t>(k)] != cplx{}) {
                if (first < 0)
                    first = k;
                last = k;
            }
        const int l = last - first;
        if (first < 0 || l <= 2)
            break;
        // Inputs l > 2 bins apart share no bright bin, so their dark overlap must
        // vanish; with the profile bounded by first/last only one product survives.
        const cplx full = dark_autocorrelation(a, l);
        const cplx single = std::conj(a[static_cast<std::size_t>(first)]) *
                            a[static_cast<std::size_t>(last)];
        worst = std::max(worst, std::abs(full - single));
        a[static_cast<std::size_t>(last)] = 0.0;
    }
    if (single_term_error)
        *single_term_error = worst;
    return a;
}

SupportLemmaReport dark_support_lemma_check(int max_support, int trials, std::uint64_t seed)
{
    if (max_support < 1 || max_support > 8)
        throw argument_error("support lemma check expects max_L in 1..8");
    SupportLemmaReport report;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    const int min_support = std::min(4, max_support);
    std::uniform_int_distribution<int> len(min_support, max_support);
    for (int t = 0; t < trials; ++t) {
        std::vector<cplx> a(static_cast<std::size_t>(len(rng)));
        for (auto& c : a)
            c = {g(rng), g(rng)};
        report.largest_initial_support =
            std::max(report.largest_initial_support, support_length(a));
        double err = 0.0;
        const auto reduced = reduce_dark_support(std::move(a), &err);
        report.max_single_term_error = std::max(report.max_single_term_error, err);
        report.largest_surviving_support =
            std::max(report.largest_surviving_support, support_length(reduced));
        ++report.trials;
    }
    return report;
}

AttainmentReport check_attainment(const SolverResult& analyzer)
{
    const auto u = compose_analyzer(analyzer.pulses);
    AttainmentReport r;
    r.eta = analyzer.eta;

    std::vector<cplx> bright(3, cplx{});
    for (std::size_t k = 0; k < 3 && k < u.es().size(); ++k)
        bright[k] = u.es()[k];
    if (std::abs(bright[0]) == 0.0)
        throw degenerate_projector_error("analyzer has no bright amplitude in its first bin");
    const cplx global = bright[0] / std::abs(bright[0]);
    r.phases.phi1 = std::arg(bright[1] / global);
    r.phases.phi2 = std::arg(bright[2] / global);
    const double expected = std::sqrt(r.eta / 3.0);
    for (const auto& b : bright)
        r.bright_magnitude_error = std::max(r.bright_magnitude_error, std::abs(std::abs(b) - expected));

    const double dark_scale = std::sqrt(1.0 - r.eta);
    for (const auto& c : u.ss())
        r.dark.push_back(c / (global * dark_scale));
    double norm = 0.0;
    for (const auto& c : r.dark)
        norm += std::norm(c);
    r.dark_norm_error = std::abs(std::sqrt(norm) - 1.0);

    const DarkPortProfile profile{r.dark, r.eta};
    r.residual_shift1 = overlap_residual(r.eta, profile, 1, r.phases);
    r.residual_shift2 = overlap_residual(r.eta, profile, 2, r.phases);
    r.residual_shift2_complex = std::abs(r.eta / 3.0 * std::polar(1.0, r.phases.phi2) +
                                         (1.0 - r.eta) * dark_autocorrelation(r.dark, 2));
    return r;
}

std::string bounds_csv(const std::vector<StructuredBound>& rows)
{
    std::size_t width = 0;
    for (const auto& row : rows)
        width = std::max(width, row.witness.size());
    std::ostringstream os;
    os << "L,sup_eta,feasible_patterns";
    for (std::size_t k = 0; k < width; ++k)
        os << ",a" << k;
    os << '\n';
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%.10f", row.sup_eta);
        os << row.support << ',' << buf << ',' << row.feasible_patterns;
        for (std::size_t k = 0; k < width; ++k) {
            std::snprintf(buf, sizeof buf, "%.6f", k < row.witness.size() ? row.witness[k] : 0.0);
            os << ',' << buf;
        }
        os << '\n';
    }
    return os.str();
}

} // namespace pra
