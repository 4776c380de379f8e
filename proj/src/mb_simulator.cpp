#include "pra/mb_simulator.hpp"

#include "pra/errors.hpp"
#include "pra/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace pra {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * pi;
constexpr double norm_drift_limit = 1e-6;

std::string fmt(const char* pattern, double value)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, value);
    return buf;
}

double fastest_rate(const SimulationConfig& cfg)
{
    return std::max({cfg.comb.bw_hz, cfg.write.gamma_hz, cfg.read.gamma_hz, cfg.write.rabi_hz,
                     cfg.read.rabi_hz});
}

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn)
{
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

// Integrates the medium over grid steps [begin, end). `probe` gives the input
// field at z = 0, `control` the control field; output[k] receives E(z = 1, t_k)
// for k in (begin, end].
class Propagator
{
public:
    Propagator(const CombProfile& comb, int nz, double dt)
      : m_nz(nz), m_nclass(comb.detuning.size()), m_dt(dt), m_weight(comb.weight),
        m_rot_re(m_nclass), m_rot_im(m_nclass), m_step(kernels::select_cell_step())
    {
        for (std::size_t k = 0; k < m_nclass; ++k) {
            m_rot_re[k] = std::cos(-0.5 * comb.detuning[k] * dt);
            m_rot_im[k] = std::sin(-0.5 * comb.detuning[k] * dt);
        }
    }

    template <class Probe, class Control>
    void run(MediumState& s, const TimeGrid& grid, std::size_t begin, std::size_t end,
             Probe&& probe, Control&& control, std::vector<cplx>& output) const
    {
        const double dz = 1.0 / m_nz;
        std::vector<cplx> prev(static_cast<std::size_t>(m_nz) + 1);
        std::vector<cplx> next(prev.size());
        // The medium is assumed to carry no optical polarisation at `begin`.
        prev.assign(prev.size(), probe(grid.at(begin)));
        const cplx i_unit(0.0, 1.0);
        for (std::size_t n = begin; n < end; ++n) {
            const double t_mid = grid.at(n) + 0.5 * m_dt;
            const cplx w = control(t_mid);
            next[0] = probe(grid.at(n + 1));
            for (int j = 0; j < m_nz; ++j) {
                const auto ju = static_cast<std::size_t>(j);
                const cplx predicted = next[ju] + (prev[ju + 1] - prev[ju]);
                const cplx drive = 0.25 * (prev[ju] + prev[ju + 1] + next[ju] + predicted);
                const auto c = kernels::make_coupling(drive.real(), drive.imag(), w.real(),
                                                      w.imag(), m_dt);
                const std::size_t off = ju * m_nclass;
                kernels::ClassBlock block{s.cg_re.data() + off, s.cg_im.data() + off,
                                          s.cs_re.data() + off, s.cs_im.data() + off,
                                          s.ce_re.data() + off, s.ce_im.data() + off,
                                          m_rot_re.data(),      m_rot_im.data(),
                                          m_weight.data(),      m_nclass};
                const auto pol = m_step(block, c);
                next[ju + 1] = next[ju] + dz * i_unit * cplx(pol.re, pol.im);
            }
            output[n + 1] = next[static_cast<std::size_t>(m_nz)];
            std::swap(prev, next);
        }
    }

private:
    int m_nz;
    std::size_t m_nclass;
    double m_dt;
    std::vector<double> m_weight;
    std::vector<double> m_rot_re, m_rot_im;
    kernels::CellStepFn m_step;
};

MediumState ground_state(int nz, std::size_t nclass)
{
    MediumState s;
    s.nz = nz;
    s.nclass = nclass;
    const std::size_t total = static_cast<std::size_t>(nz) * nclass;
    s.cg_re.assign(total, 1.0);
    for (auto* v : {&s.cg_im, &s.cs_re, &s.cs_im, &s.ce_re, &s.ce_im})
        v->assign(total, 0.0);
    return s;
}

// Drops optical coherence (and the tiny excited population with it) and
// restores unit norm per class.
void zero_optical(MediumState& s)
{
    for (std::size_t k = 0; k < s.cg_re.size(); ++k) {
        s.ce_re[k] = 0.0;
        s.ce_im[k] = 0.0;
        const double n = std::sqrt(s.cg_re[k] * s.cg_re[k] + s.cg_im[k] * s.cg_im[k] +
                                   s.cs_re[k] * s.cs_re[k] + s.cs_im[k] * s.cs_im[k]);
        s.cg_re[k] /= n;
        s.cg_im[k] /= n;
        s.cs_re[k] /= n;
        s.cs_im[k] /= n;
    }
}

std::string amplitude_key(const std::vector<cplx>& amps)
{
    std::ostringstream os;
    os.precision(17);
    for (const auto& a : amps)
        os << a.real() << ',' << a.imag() << ';';
    return os.str();
}

void check_drift(double drift, const char* stage)
{
    if (!(drift <= norm_drift_limit))
        throw numerical_error(std::string("class norm drifted by ") + fmt("%.3g", drift) +
                              " during " + stage);
}

// Fritsch-Carlson slopes for monotone cubic interpolation.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n < 2)
        return m;
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x[k + 1] - x[k];
        del[k] = (y[k + 1] - y[k]) / h[k];
    }
    if (n == 2) {
        m[0] = m[1] = del[0];
        return m;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (del[k - 1] * del[k] <= 0.0)
            continue;
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        m[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0)
            s = 0.0;
        else if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0))
            s = 3.0 * d0;
        return s;
    };
    m[0] = end_slope(h[0], h[1], del[0], del[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    return m;
}

double hermite(double x0, double x1, double y0, double y1, double m0, double m1, double x)
{
    const double h = x1 - x0;
    const double t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * h * m1;
}

} // namespace

// ---------------------------------------------------------------------------

void SimulationConfig::validate() const
{
    std::vector<std::string> items;
    if (!(comb.d >= 0.0))
        items.push_back("comb.d must be nonnegative");
    if (!(comb.bw_hz > 0.0))
        items.push_back("comb.bw_hz must be positive");
    if (!(comb.delta_hz > 0.0))
        items.push_back("comb.delta_hz must be positive");
    else if (comb.bw_hz > 0.0 && comb.bw_hz / comb.delta_hz < 3.0)
        items.push_back("comb.bw_hz / comb.delta_hz must be at least 3 (too few teeth)");
    if (input.amplitudes.empty() || input.amplitudes.size() > 3)
        items.push_back("input amplitudes must span 1 to 3 bins");
    else {
        double n = 0.0;
        for (const auto& a : input.amplitudes)
            n += std::norm(a);
        if (!(n > 0.0) || !std::isfinite(n))
            items.push_back("input amplitudes must be finite and not all zero");
    }
    if (!(input.tau_s > 0.0))
        items.push_back("input.tau_s must be positive");
    if (!(input.width_ratio > 0.0))
        items.push_back("input.width_ratio must be positive");
    if (!(input.peak_rabi_hz > 0.0))
        items.push_back("input.peak_rabi_hz must be positive");
    for (const auto& [name, p] : {std::pair{"write", &write}, std::pair{"read", &read}}) {
        try {
            p->validate();
        } catch (const config_error& e) {
            for (const auto& item : e.items())
                items.push_back(std::string(name) + "." + item);
        }
    }
    if (grids.nz < 1)
        items.push_back("grids.nz must be at least 1");
    if (grids.ndelta < 1)
        items.push_back("grids.ndelta must be at least 1");
    if (grids.dt_s < 0.0)
        items.push_back("grids.dt_s must be positive (or 0 for the default)");
    if (comb.bw_hz > 0.0 && comb.delta_hz > 0.0 && grids.ndelta >= 1) {
        const long teeth = std::lround(comb.bw_hz / comb.delta_hz);
        if (teeth > 0 && grids.ndelta / teeth < 10)
            items.push_back("grids.ndelta must give at least 10 classes per comb tooth (" +
                            std::to_string(10 * teeth) + " needed)");
    }
    if (items.empty()) {
        const double dt = time_step();
        const double rate = fastest_rate(*this);
        if (dt * rate > 0.1)
            items.push_back("grids.dt_s " + fmt("%.3g", dt) + " s does not resolve " +
                            fmt("%.3g", rate) + " Hz (need <= " + fmt("%.3g", 0.1 / rate) + " s)");
        for (const auto* p : {&write, &read}) {
            try {
                check_pulse_sampling(*p, dt);
            } catch (const config_error& e) {
                items.insert(items.end(), e.items().begin(), e.items().end());
            }
        }
    }
    if (!std::isfinite(spin_wait_s) || spin_wait_s < 0.0)
        items.push_back("spin_wait_s must be nonnegative");
    if (!items.empty())
        throw config_error("invalid simulation config", items);
}

double SimulationConfig::time_step() const
{
    if (grids.dt_s > 0.0)
        return grids.dt_s;
    return 1.0 / (50.0 * fastest_rate(*this));
}

double comb_finesse(double d)
{
    if (!(d >= 0.0))
        throw argument_error("optical depth must be nonnegative");
    return pi / std::atan(two_pi / d);
}

CombProfile build_comb(double d, double bw_hz, double delta_hz, int ndelta)
{
    if (!(d >= 0.0) || !(bw_hz > 0.0) || !(delta_hz > 0.0))
        throw config_error("invalid comb", {"d must be >= 0, bw_hz and delta_hz > 0"});
    if (bw_hz / delta_hz < 3.0)
        throw config_error("too few comb teeth", {"bw_hz / delta_hz must be at least 3"});
    CombProfile c;
    c.d = d;
    c.bw_hz = bw_hz;
    c.delta_hz = delta_hz;
    c.finesse = comb_finesse(d);
    c.tooth_width_hz = delta_hz / c.finesse;
    c.teeth = static_cast<int>(std::lround(bw_hz / delta_hz));
    c.classes_per_tooth = ndelta / c.teeth;
    if (c.classes_per_tooth < 10)
        throw config_error("detuning grid too coarse",
                           {"need at least 10 classes per tooth, got " +
                            std::to_string(c.classes_per_tooth)});
    const int m = c.classes_per_tooth;
    const double spacing_hz = c.tooth_width_hz / m;
    const double g = d * (two_pi * spacing_hz) / pi;
    for (int t = 0; t < c.teeth; ++t) {
        const double center = (t - 0.5 * (c.teeth - 1)) * delta_hz;
        for (int i = 0; i < m; ++i) {
            const double offset = ((i + 0.5) / m - 0.5) * c.tooth_width_hz;
            c.detuning.push_back(two_pi * (center + offset));
            c.weight.push_back(g);
        }
    }
    return c;
}

double afc_theory_efficiency(double d, double finesse)
{
    if (!(d >= 0.0) || !(finesse > 1.0))
        throw argument_error("afc efficiency needs d >= 0 and F > 1");
    const double x = d / finesse;
    const double arg = pi / finesse;
    const double sinc = std::sin(arg) / arg;
    return x * x * std::exp(-x) * sinc * sinc;
}

double Timeline::slot_center(int j) const
{
    return (j + 0.5) * tau + t_afc + (read_center - write_center);
}

Timeline make_timeline(const SimulationConfig& cfg)
{
    Timeline t;
    t.tau = cfg.input.tau_s;
    const double bins = 3.0;
    t.write_center = bins * t.tau + 0.5 * cfg.write.tc_s;
    t.write_end = t.write_center + 0.5 * cfg.write.tc_s;
    t.read_center = t.write_end + 0.5 * cfg.read.tc_s;
    t.t_afc = 1.0 / cfg.comb.delta_hz;
    const double last_slot_end = t.slot_center(Timeline::slots - 1) + 0.5 * t.tau;
    const double read_end = t.read_center + 2.0 * t.tau + 0.5 * cfg.read.tc_s;
    t.end = std::max(last_slot_end + t.tau, read_end);
    return t;
}

double FieldTrace::energy(double t0, double t1) const
{
    // window edges snap to the nearest sample so shifted windows pick shifted samples
    const auto edge = [&](double t) {
        const double k = std::round((t - grid.t0) / grid.dt);
        return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(envelope.size())));
    };
    double acc = 0.0;
    for (std::size_t k = edge(t0); k < edge(t1); ++k)
        acc += std::norm(envelope[k]);
    return acc * grid.dt;
}

double FieldTrace::slot_energy(int j) const
{
    const double c = slot_centers.at(static_cast<std::size_t>(j));
    return energy(c - 0.5 * tau, c + 0.5 * tau);
}

double FieldTrace::peak_intensity() const
{
    double peak = 0.0;
    for (const auto& e : envelope)
        peak = std::max(peak, std::norm(e));
    return peak;
}

std::string field_trace_csv(const FieldTrace& trace)
{
    std::ostringstream os;
    os << "t_s,re,im,intensity\n";
    char buf[160];
    for (std::size_t k = 0; k < trace.envelope.size(); ++k) {
        const auto& e = trace.envelope[k];
        std::snprintf(buf, sizeof buf, "%.9e,%.9e,%.9e,%.9e\n", trace.grid.at(k), e.real(),
                      e.imag(), std::norm(e));
        os << buf;
    }
    return os.str();
}

double MediumState::spin_population() const
{
    double acc = 0.0;
    for (std::size_t k = 0; k < cs_re.size(); ++k)
        acc += cs_re[k] * cs_re[k] + cs_im[k] * cs_im[k];
    return acc;
}

double MediumState::max_norm_drift() const
{
    double worst = 0.0;
    for (std::size_t k = 0; k < cg_re.size(); ++k) {
        const double n = cg_re[k] * cg_re[k] + cg_im[k] * cg_im[k] + cs_re[k] * cs_re[k] +
                         cs_im[k] * cs_im[k] + ce_re[k] * ce_re[k] + ce_im[k] * ce_im[k];
        worst = std::max(worst, std::abs(n - 1.0));
    }
    return worst;
}

// ---------------------------------------------------------------------------

TransferCalibration::TransferCalibration(std::vector<double> scales, std::vector<double> transfer,
                                         double monotone_tolerance)
  : m_scales(std::move(scales)), m_transfer(std::move(transfer))
{
    if (m_scales.size() != m_transfer.size() || m_scales.size() < 2)
        throw calibration_error("calibration needs at least two (scale, transfer) pairs");
    for (std::size_t k = 0; k + 1 < m_scales.size(); ++k)
        if (!(m_scales[k + 1] > m_scales[k]))
            throw calibration_error("calibration scales must be strictly increasing");
    std::vector<std::string> problems;
    for (std::size_t k = 0; k + 1 < m_transfer.size(); ++k)
        if (m_transfer[k + 1] < m_transfer[k] - monotone_tolerance) {
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "transfer drops from %.5f to %.5f between scale %.4f and %.4f", m_transfer[k],
                          m_transfer[k + 1], m_scales[k], m_scales[k + 1]);
            problems.push_back(buf);
        }
    if (!problems.empty()) {
        std::string what = "non-monotone amplitude-to-transfer map:";
        for (const auto& p : problems)
            what += "\n  " + p;
        throw calibration_error(what);
    }
    // remove sub-tolerance dips so the interpolant is monotone
    for (std::size_t k = 1; k < m_transfer.size(); ++k)
        m_transfer[k] = std::max(m_transfer[k], m_transfer[k - 1]);
    m_slopes = pchip_slopes(m_scales, m_transfer);
}

double TransferCalibration::transfer_at(double scale) const
{
    if (m_scales.empty())
        throw calibration_error("empty calibration");
    if (scale <= m_scales.front())
        return m_transfer.front();
    if (scale >= m_scales.back())
        return m_transfer.back();
    const auto it = std::upper_bound(m_scales.begin(), m_scales.end(), scale);
    const auto k = static_cast<std::size_t>(it - m_scales.begin()) - 1;
    return hermite(m_scales[k], m_scales[k + 1], m_transfer[k], m_transfer[k + 1], m_slopes[k],
                   m_slopes[k + 1], scale);
}

double TransferCalibration::scale_for(double transfer) const
{
    if (m_scales.empty())
        throw calibration_error("empty calibration");
    if (transfer <= m_transfer.front())
        return m_scales.front();
    if (transfer >= m_transfer.back())
        return m_scales.back();
    std::size_t k = 0;
    while (k + 2 < m_transfer.size() && m_transfer[k + 1] < transfer)
        ++k;
    double lo = m_scales[k], hi = m_scales[k + 1];
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (transfer_at(mid) < transfer ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------

struct StorageSession::Cache
{
    std::mutex mutex;
    std::map<std::string, std::shared_ptr<const StoredMedium>> media;
};

StorageSession::StorageSession(SimulationConfig cfg)
  : m_cfg(std::move(cfg)), m_cache(std::make_unique<Cache>())
{
    m_cfg.validate();
    m_comb = build_comb(m_cfg.comb.d, m_cfg.comb.bw_hz, m_cfg.comb.delta_hz, m_cfg.grids.ndelta);
    m_timeline = make_timeline(m_cfg);
}

StorageSession::~StorageSession() = default;

TimeGrid StorageSession::grid() const
{
    const double dt = m_cfg.time_step();
    return {0.0, dt, static_cast<std::size_t>(std::ceil(m_timeline.end / dt)) + 1};
}

std::shared_ptr<const StoredMedium> StorageSession::store(const std::vector<cplx>& amplitudes)
{
    const auto key = amplitude_key(amplitudes);
    {
        std::lock_guard lock(m_cache->mutex);
        if (auto it = m_cache->media.find(key); it != m_cache->media.end())
            return it->second;
    }
    const auto g = grid();
    const auto write_index =
        static_cast<std::size_t>(std::llround(m_timeline.write_end / g.dt));

    BinTrain train{amplitudes, m_cfg.input.tau_s, m_cfg.input.width_ratio,
                   two_pi * m_cfg.input.peak_rabi_hz};
    const HshPulse write = m_cfg.write;
    const double w_center = m_timeline.write_center;

    auto medium = std::make_shared<StoredMedium>();
    medium->amplitudes = amplitudes;
    medium->state = ground_state(m_cfg.grids.nz, m_comb.detuning.size());
    medium->early_output.assign(write_index + 1, cplx{});
    medium->early_output[0] = gaussian_train_at(train, 0.0);

    double e_in = 0.0;
    for (std::size_t k = 0; k < g.n; ++k)
        e_in += std::norm(gaussian_train_at(train, g.at(k)));
    medium->input_energy = e_in * g.dt;

    Propagator prop(m_comb, m_cfg.grids.nz, g.dt);
    prop.run(
        medium->state, g, 0, write_index, [&](double t) { return gaussian_train_at(train, t); },
        [&](double t) { return hsh_envelope(write, t - w_center); }, medium->early_output);

    medium->norm_drift = medium->state.max_norm_drift();
    check_drift(medium->norm_drift, "input and write");
    zero_optical(medium->state);

    std::lock_guard lock(m_cache->mutex);
    auto [it, inserted] = m_cache->media.emplace(key, std::move(medium));
    return it->second;
}

PraResult StorageSession::read(const StoredMedium& medium, const ChshPulse& pulse,
                               double center) const
{
    const auto g = grid();
    const std::size_t write_index = medium.early_output.size() - 1;

    PraResult r;
    r.input_energy = medium.input_energy;
    r.trace.grid = g;
    r.trace.tau = m_timeline.tau;
    for (int j = 0; j < Timeline::slots; ++j)
        r.trace.slot_centers[static_cast<std::size_t>(j)] = m_timeline.slot_center(j);
    r.trace.envelope.assign(g.n, cplx{});
    std::copy(medium.early_output.begin(), medium.early_output.end(), r.trace.envelope.begin());

    MediumState state = medium.state;
    Propagator prop(m_comb, m_cfg.grids.nz, g.dt);
    prop.run(
        state, g, write_index, g.n - 1, [](double) { return cplx{}; },
        [&](double t) { return chsh_envelope(pulse, t - center); }, r.trace.envelope);

    r.max_norm_drift = std::max(medium.norm_drift, state.max_norm_drift());
    check_drift(r.max_norm_drift, "read-out");
    for (int j = 0; j < Timeline::slots; ++j)
        r.slot_energies[static_cast<std::size_t>(j)] = r.trace.slot_energy(j);
    r.interference_energy = r.slot_energies[Timeline::interference_slot];
    r.scales = pulse.scales;
    return r;
}

StorageResult StorageSession::run_storage(const std::vector<cplx>& amplitudes, bool with_read)
{
    const auto medium = store(amplitudes);
    HshPulse shape = m_cfg.read;
    ChshPulse pulse{shape, {with_read ? 1.0 : 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, m_timeline.tau};
    const auto pra = read(*medium, pulse, m_timeline.read_center);

    StorageResult s;
    s.trace = pra.trace;
    s.input_energy = medium->input_energy;
    s.echo_energy = s.trace.energy(m_timeline.write_end, m_timeline.end + 1.0);
    s.eta0 = s.echo_energy / s.input_energy;
    s.transmitted_fraction = s.trace.energy(0.0, m_timeline.write_end) / s.input_energy;
    s.max_norm_drift = pra.max_norm_drift;
    s.slot_energies = pra.slot_energies;
    return s;
}

double StorageSession::measure_transfer(double scale)
{
    if (!(scale >= 0.0 && scale <= 1.0))
        throw argument_error("calibration scale must lie in [0, 1]");
    const auto medium = store({1.0, 0.0, 0.0});
    const double before = medium->state.spin_population();
    if (!(before > 0.0))
        throw calibration_error("nothing stored in the spin state; cannot calibrate");
    if (scale == 0.0)
        return 0.0;

    const auto g = grid();
    const std::size_t begin = medium->early_output.size() - 1;
    const double center = m_timeline.read_center;
    const auto stop = std::min(
        g.n - 1, static_cast<std::size_t>(std::ceil((center + 0.5 * m_cfg.read.tc_s) / g.dt)) + 1);
    HshPulse shape = m_cfg.read;
    shape.scale = scale;
    MediumState state = medium->state;
    std::vector<cplx> out(g.n);
    Propagator prop(m_comb, m_cfg.grids.nz, g.dt);
    prop.run(
        state, g, begin, stop, [](double) { return cplx{}; },
        [&](double t) { return hsh_envelope(shape, t - center); }, out);
    check_drift(state.max_norm_drift(), "calibration");
    return 1.0 - state.spin_population() / before;
}

TransferCalibration StorageSession::calibrate_transfer(std::span<const double> scales)
{
    if (scales.size() < 2 || scales.front() != 0.0 || scales.back() != 1.0)
        throw argument_error("calibration grid must span [0, 1]");
    std::vector<double> p;
    p.reserve(scales.size());
    for (double s : scales)
        p.push_back(measure_transfer(s));
    return TransferCalibration(std::vector<double>(scales.begin(), scales.end()), std::move(p));
}

TransferCalibration StorageSession::calibrate_transfer(int points)
{
    if (points < 2)
        throw argument_error("calibration needs at least two points");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k)
        grid[static_cast<std::size_t>(k)] = static_cast<double>(k) / (points - 1);
    return calibrate_transfer(grid);
}

ChshPulse analyzer_composite(const HshPulse& shape, const SolverResult& analyzer,
                             const TransferCalibration& calibration, double tau)
{
    ChshPulse c;
    c.shape = shape;
    c.shape.scale = 1.0;
    c.tau_s = tau;
    for (std::size_t k = 0; k < 3; ++k) {
        const auto& p = analyzer.pulses[k];
        c.scales[2 - k] = calibration.scale_for(p.transfer_probability());
        c.phases[2 - k] = p.phase();
    }
    return c;
}

PraResult StorageSession::run_pra(const std::vector<cplx>& amplitudes, const SolverResult& analyzer,
                                  const TransferCalibration& calibration)
{
    const auto medium = store(amplitudes);
    const auto pulse = analyzer_composite(m_cfg.read, analyzer, calibration, m_timeline.tau);
    return read(*medium, pulse, m_timeline.read_center + 2.0 * m_timeline.tau);
}

BasisSimulation StorageSession::simulate_basis(const Basis& inputs,
                                               const std::array<SolverResult, 3>& analyzers,
                                               const TransferCalibration& calibration, int threads)
{
    std::array<std::vector<cplx>, 3> amps;
    for (std::size_t i = 0; i < 3; ++i)
        amps[i] = inputs[i].amplitudes();

    parallel_for(3, threads, [&](std::size_t i) { store(amps[i]); });

    BasisSimulation out;
    std::array<double, 3> input_energy{};
    std::array<double, 3> drift_eta{};
    std::array<std::array<double, 3>, 3> energy{};
    std::array<std::array<double, 3>, 3> drift{};
    parallel_for(12, threads, [&](std::size_t task) {
        if (task < 3) {
            const auto s = run_storage(amps[task]);
            out.eta0[task] = s.eta0;
            input_energy[task] = s.input_energy;
            drift_eta[task] = s.max_norm_drift;
        } else {
            const std::size_t j = (task - 3) / 3, i = (task - 3) % 3;
            const auto r = run_pra(amps[i], analyzers[j], calibration);
            energy[j][i] = r.interference_energy;
            drift[j][i] = r.max_norm_drift;
        }
    });

    double diag = 0.0, total = 0.0;
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 3; ++i) {
            out.overlap[j][i] = energy[j][i] / (out.eta0[i] * input_energy[i]);
            total += out.overlap[j][i];
            if (i == j)
                diag += out.overlap[j][i];
            out.max_norm_drift = std::max({out.max_norm_drift, drift[j][i], drift_eta[i]});
        }
    out.mean_efficiency = diag / 3.0;
    out.fidelity = diag / total;
    return out;
}

StorageResult run_storage(const SimulationConfig& cfg)
{
    StorageSession session(cfg);
    return session.run_storage(cfg.input.amplitudes);
}

TransferCalibration calibrate_transfer(const SimulationConfig& cfg, int points)
{
    StorageSession session(cfg);
    return session.calibrate_transfer(points);
}

int default_thread_count()
{
    if (const char* env = std::getenv("PRA_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace pra
