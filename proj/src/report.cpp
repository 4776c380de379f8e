#include "pra/report.hpp"

#include "pra/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace pra {

namespace {

std::string num(double v, const char* f = "%.6g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame
{
    double width = 640, height = 400;
    double left = 60, right = 20, top = 40, bottom = 50;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

    double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
    double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

std::string svg_open(const Frame& f, const std::string& title)
{
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
       << f.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << f.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(title) << "</text>\n";
    return os.str();
}

std::string axes(const Frame& f, const std::string& xlabel, const std::string& ylabel)
{
    std::ostringstream os;
    os << "<g stroke=\"black\" fill=\"none\">"
       << "<line x1=\"" << f.px(f.x0) << "\" y1=\"" << f.py(f.y0) << "\" x2=\"" << f.px(f.x1)
       << "\" y2=\"" << f.py(f.y0) << "\"/>"
       << "<line x1=\"" << f.px(f.x0) << "\" y1=\"" << f.py(f.y0) << "\" x2=\"" << f.px(f.x0)
       << "\" y2=\"" << f.py(f.y1) << "\"/></g>\n";
    for (int k = 0; k <= 4; ++k) {
        const double x = f.x0 + (f.x1 - f.x0) * k / 4;
        const double y = f.y0 + (f.y1 - f.y0) * k / 4;
        os << "<text x=\"" << f.px(x) << "\" y=\"" << f.py(f.y0) + 16
           << "\" text-anchor=\"middle\">" << num(x, "%.3g") << "</text>\n";
        os << "<text x=\"" << f.px(f.x0) - 6 << "\" y=\"" << f.py(y) + 4
           << "\" text-anchor=\"end\">" << num(y, "%.3g") << "</text>\n";
    }
    os << "<text x=\"" << (f.px(f.x0) + f.px(f.x1)) / 2 << "\" y=\"" << f.height - 10
       << "\" text-anchor=\"middle\">" << escape(xlabel) << "</text>\n";
    os << "<text x=\"14\" y=\"" << (f.py(f.y0) + f.py(f.y1)) / 2
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << (f.py(f.y0) + f.py(f.y1)) / 2
       << ")\">" << escape(ylabel) << "</text>\n";
    return os.str();
}

std::string polyline(const Frame& f, const std::vector<double>& x, const std::vector<double>& y,
                     const char* color)
{
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < x.size(); ++k)
        os << num(f.px(x[k]), "%.2f") << ',' << num(f.py(y[k]), "%.2f") << ' ';
    os << "\"/>\n";
    return os.str();
}

const char* palette[3] = {"#1f77b4", "#d62728", "#2ca02c"};

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw io_error("failed writing " + path.string());
}

std::string safe_stem(const std::string& s)
{
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out.empty() ? "unnamed" : out;
}

} // namespace

bool ReportContent::empty() const
{
    return table1.empty() && table2.empty() && overlaps.empty() && visibility.empty() &&
           traces.empty();
}

std::uint64_t fnv1a(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hashed_name(const std::string& stem, const std::string& ext, std::string_view content)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08llx",
                  static_cast<unsigned long long>(fnv1a(content) >> 32));
    return safe_stem(stem) + "_" + buf + "." + ext;
}

std::string table2_csv(const std::vector<Table2Row>& rows)
{
    std::ostringstream os;
    os << "basis,eta,fidelity,source\n";
    for (const auto& r : rows)
        os << r.basis << ',' << num(r.eta, "%.6f") << ',' << num(r.fidelity, "%.6f") << ','
           << to_string(r.overlap.source) << '\n';
    return os.str();
}

std::string overlap_csv(const OverlapMatrix& m)
{
    std::ostringstream os;
    os << "analyzer,input0,input1,input2\n";
    for (std::size_t j = 0; j < 3; ++j)
        os << j << ',' << num(m.m[j][0], "%.8f") << ',' << num(m.m[j][1], "%.8f") << ','
           << num(m.m[j][2], "%.8f") << '\n';
    return os.str();
}

std::string visibility_csv(const std::array<VisibilityCurve, 3>& curves)
{
    std::ostringstream os;
    os << "phi,overlap0,overlap1,overlap2\n";
    for (std::size_t k = 0; k < curves[0].phi.size(); ++k)
        os << num(curves[0].phi[k], "%.8f") << ',' << num(curves[0].overlap[k], "%.8f") << ','
           << num(curves[1].overlap[k], "%.8f") << ',' << num(curves[2].overlap[k], "%.8f")
           << '\n';
    os << "# fit projector,amplitude,offset,mean,residual\n";
    for (const auto& c : curves)
        os << "# " << c.projector << ',' << num(c.fit.amplitude, "%.8f") << ','
           << (c.fit.offset_defined ? num(c.fit.offset, "%.8f") : std::string("nan")) << ','
           << num(c.fit.mean, "%.8f") << ',' << num(c.fit.residual, "%.3e") << '\n';
    return os.str();
}

std::string overlap_svg(const std::string& title, const OverlapMatrix& m)
{
    Frame f;
    f.width = 360;
    f.height = 380;
    double peak = 0.0;
    for (const auto& row : m.m)
        for (double v : row)
            peak = std::max(peak, v);
    std::ostringstream os;
    os << svg_open(f, title);
    const double cell = 90, x0 = 60, y0 = 50;
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 3; ++i) {
            const double v = peak > 0 ? m.m[j][i] / peak : 0.0;
            const int shade = static_cast<int>(std::lround(255 * (1 - v)));
            os << "<rect class=\"cell\" x=\"" << x0 + cell * i << "\" y=\"" << y0 + cell * j
               << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << shade
               << ',' << shade << ",255)\" stroke=\"gray\"/>\n";
            os << "<text x=\"" << x0 + cell * (i + 0.5) << "\" y=\"" << y0 + cell * (j + 0.5) + 4
               << "\" text-anchor=\"middle\">" << num(m.m[j][i], "%.3f") << "</text>\n";
        }
    os << "<text x=\"" << x0 + 1.5 * cell << "\" y=\"" << y0 + 3 * cell + 24
       << "\" text-anchor=\"middle\">input</text>\n";
    os << "<text x=\"20\" y=\"" << y0 + 1.5 * cell
       << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << y0 + 1.5 * cell
       << ")\">analyzer</text>\n</svg>\n";
    return os.str();
}

std::string visibility_svg(const std::string& title, const std::array<VisibilityCurve, 3>& curves)
{
    Frame f;
    f.x0 = 0;
    f.x1 = std::numbers::pi;
    double top = 0.0;
    for (const auto& c : curves)
        for (double v : c.overlap)
            top = std::max(top, v);
    f.y1 = top > 0 ? 1.1 * top : 1.0;
    std::ostringstream os;
    os << svg_open(f, title) << axes(f, "phi (rad)", "overlap");
    for (std::size_t j = 0; j < 3; ++j) {
        const auto& c = curves[j];
        for (std::size_t k = 0; k < c.phi.size(); ++k)
            os << "<circle cx=\"" << num(f.px(c.phi[k]), "%.2f") << "\" cy=\""
               << num(f.py(c.overlap[k]), "%.2f") << "\" r=\"3\" fill=\"" << palette[j] << "\"/>\n";
        std::vector<double> x, y;
        for (int k = 0; k <= 200; ++k) {
            const double p = f.x1 * k / 200;
            x.push_back(p);
            y.push_back(c.fit.amplitude * std::cos(2 * (p - c.fit.offset)) + c.fit.mean);
        }
        os << polyline(f, x, y, palette[j]);
    }
    os << "</svg>\n";
    return os.str();
}

std::string trace_svg(const std::string& title, const FieldTrace& trace)
{
    Frame f;
    f.width = 720;
    const double t_lo = trace.slot_centers.front() - 2 * trace.tau;
    const double t_hi = trace.slot_centers.back() + 2 * trace.tau;
    f.x0 = t_lo * 1e6;
    f.x1 = t_hi * 1e6;
    std::vector<double> x, y;
    double peak = 0.0;
    for (std::size_t k = 0; k < trace.envelope.size(); ++k) {
        const double t = trace.grid.at(k);
        if (t < t_lo || t > t_hi)
            continue;
        x.push_back(t * 1e6);
        y.push_back(std::norm(trace.envelope[k]));
        peak = std::max(peak, y.back());
    }
    f.y1 = peak > 0 ? 1.1 * peak : 1.0;
    // thin out long traces
    const std::size_t stride = std::max<std::size_t>(1, x.size() / 2000);
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < x.size(); k += stride) {
        xs.push_back(x[k]);
        ys.push_back(y[k]);
    }
    std::ostringstream os;
    os << svg_open(f, title);
    for (std::size_t j = 0; j < trace.slot_centers.size(); ++j) {
        const double a = f.px((trace.slot_centers[j] - 0.5 * trace.tau) * 1e6);
        const double b = f.px((trace.slot_centers[j] + 0.5 * trace.tau) * 1e6);
        const bool interference = static_cast<int>(j) == Timeline::interference_slot;
        os << "<rect x=\"" << a << "\" y=\"" << f.top << "\" width=\"" << b - a << "\" height=\""
           << f.height - f.top - f.bottom << "\" fill=\"" << (interference ? "#ffe0b0" : "#eeeeee")
           << "\"/>\n";
    }
    os << axes(f, "time (us)", "|E|^2 (rad/s)^2") << polyline(f, xs, ys, palette[0]) << "</svg>\n";
    return os.str();
}

std::vector<std::filesystem::path> emit_report(const ReportContent& content,
                                               const std::filesystem::path& dir)
{
    std::vector<std::filesystem::path> written;
    if (content.empty())
        return written;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw io_error("cannot create output directory " + dir.string() +
                       (ec ? ": " + ec.message() : std::string()));

    auto put = [&](const std::string& stem, const std::string& ext, const std::string& body) {
        const auto path = dir / hashed_name(stem, ext, body);
        write_file(path, body);
        written.push_back(path);
    };

    if (!content.table1.empty())
        put("table1", "csv", table1_csv(content.table1));
    if (!content.table2.empty()) {
        put("table2", "csv", table2_csv(content.table2));
        for (const auto& r : content.table2) {
            put("overlap_" + r.basis, "csv", overlap_csv(r.overlap));
            put("overlap_" + r.basis, "svg", overlap_svg(r.basis, r.overlap));
        }
    }
    for (const auto& o : content.overlaps) {
        put("overlap_" + o.name, "csv", overlap_csv(o.matrix));
        put("overlap_" + o.name, "svg", overlap_svg(o.name, o.matrix));
    }
    for (const auto& v : content.visibility) {
        put("visibility_" + v.name, "csv", visibility_csv(v.curves));
        put("visibility_" + v.name, "svg", visibility_svg(v.name, v.curves));
    }
    for (const auto& t : content.traces) {
        put("trace_" + t.name, "csv", field_trace_csv(t.trace));
        put("trace_" + t.name, "svg", trace_svg(t.name, t.trace));
    }
    return written;
}

} // namespace pra
