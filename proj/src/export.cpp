#include "csf/export.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <istream>
#include <sstream>

namespace csf {

namespace {

std::string num(double v, const char* fmt = "%.17g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_csv(std::ostream& os, const PlaneCurve& curve, const Trajectory* phase) {
    if (phase && phase->size() != curve.size())
        throw DomainError("write_csv: trajectory and curve sample counts differ");
    const PolarTrace pt = polar(curve);
    const Params& prm = curve.params();
    const Complex conj_ab(prm.A, -prm.B);
    os << kCsvHeader << '\n';
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const CurvePoint& c = curve.points()[i];
        double x = c.k, y = 0.0;
        if (phase) {
            x = phase->samples()[i].x;
            y = phase->samples()[i].y;
        } else if (!prm.degenerate()) {
            y = (conj_ab * std::polar(1.0, -c.theta) * c.p).imag();
        }
        os << num(c.s) << ',' << num(x) << ',' << num(y) << ',' << num(c.theta) << ','
           << num(c.p.real()) << ',' << num(c.p.imag()) << ',' << num(pt.r[i]) << ','
           << num(pt.phi[i]) << '\n';
    }
}

std::vector<Sample> read_phase_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DomainError("read_phase_csv: empty input");
    std::vector<std::string> names;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto blank = [](unsigned char ch) { return std::isspace(ch) != 0; };
            cell.erase(std::remove_if(cell.begin(), cell.end(), blank), cell.end());
            names.push_back(cell);
        }
    }
    auto column = [&](const char* name) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw DomainError(std::string("read_phase_csv: missing column ") + name);
        return static_cast<std::size_t>(it - names.begin());
    };
    const std::size_t cs = column("s"), cx = column("x"), cy = column("y"), ct = column("theta");
    std::vector<Sample> out;
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str())
                throw DomainError("read_phase_csv: row " + std::to_string(row) + " is not numeric");
            vals.push_back(v);
        }
        if (vals.size() < names.size())
            throw DomainError("read_phase_csv: row " + std::to_string(row) + " is short");
        out.push_back({vals[cs], vals[cx], vals[cy], vals[ct]});
        if (out.size() > 1 && !(out.back().s > out[out.size() - 2].s))
            throw DomainError("read_phase_csv: s must be strictly increasing");
    }
    if (out.size() < 2) throw DomainError("read_phase_csv: need at least two rows");
    return out;
}

std::vector<Complex> plot_points(const PlaneCurve& c, std::size_t max_points) {
    if (c.size() <= max_points) {
        std::vector<Complex> out;
        out.reserve(c.size());
        for (const CurvePoint& p : c.points()) out.push_back(p.p);
        return out;
    }
    std::vector<Complex> out;
    out.reserve(max_points);
    for (std::size_t i = 0; i < max_points; ++i)
        out.push_back(c.at(c.s_begin() + c.length() * static_cast<double>(i) / (max_points - 1)).p);
    return out;
}

void write_svg(std::ostream& os, const std::vector<PlaneCurve>& curves, const SvgOptions& opts) {
    std::vector<std::vector<Complex>> lines;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const PlaneCurve& c : curves) {
        lines.push_back(plot_points(c));
        for (Complex p : lines.back()) {
            x0 = std::min(x0, p.real());
            x1 = std::max(x1, p.real());
            y0 = std::min(y0, p.imag());
            y1 = std::max(y1, p.imag());
        }
    }
    if (!(x0 <= x1)) {
        x0 = y0 = -1.0;
        x1 = y1 = 1.0;
    }
    double w = x1 - x0, h = y1 - y0;
    const double side = std::max({w, h, 1e-12});
    w = std::max(w, 1e-3 * side);
    h = std::max(h, 1e-3 * side);
    const double mx = 0.05 * w, my = 0.05 * h;
    const double vw = w + 2 * mx, vh = h + 2 * my;
    const double stroke = 0.003 * std::max(vw, vh);
    // SVG y grows downwards; flip so the plane's y axis points up.
    const double top = -(y1 + my);

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    if (opts.timestamp) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        os << "<!-- generated " << buf << " -->\n";
    }
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(opts.width_px, "%.6g")
       << "\" height=\"" << num(opts.width_px * vh / vw, "%.6g") << "\" viewBox=\""
       << num(x0 - mx, "%.9g") << ' ' << num(top, "%.9g") << ' ' << num(vw, "%.9g") << ' '
       << num(vh, "%.9g") << "\">\n";
    if (!opts.metadata.empty()) os << "<metadata>" << xml_escape(opts.metadata) << "</metadata>\n";
    os << "<g fill=\"none\" stroke=\"#1b2a49\" stroke-linejoin=\"round\" stroke-linecap=\"round\" "
          "stroke-width=\""
       << num(stroke, "%.6g") << "\">\n";
    for (const auto& line : lines) {
        os << "<polyline points=\"";
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i) os << ' ';
            os << num(line[i].real(), "%.7g") << ',' << num(-line[i].imag(), "%.7g");
        }
        os << "\"/>\n";
    }
    os << "</g>\n</svg>\n";
}

}  // namespace csf
