#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <unordered_map>

#include "csf/geometry.hpp"

namespace csf {

namespace {

constexpr double pi = std::numbers::pi;

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

double shoelace(const std::vector<Complex>& poly) {
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        twice += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * twice;
}

// Polygon of the sub-arc [s1, s2], closed through the double point.
std::vector<Complex> loop_polygon(const PlaneCurve& c, double s1, double s2, double ds) {
    const auto n = static_cast<std::size_t>(std::max(8.0, std::ceil((s2 - s1) / ds)));
    std::vector<Complex> poly;
    poly.reserve(n);
    for (std::size_t i = 0; i < n; ++i) poly.push_back(c.at(s1 + (s2 - s1) * i / n).p);
    return poly;
}

struct Candidate {
    std::size_t i;
    std::size_t j;
    double a;
    double b;
};

// Newton on P(s) - P(t) = 0 with Jacobian [T(s), -T(t)].
bool refine(const PlaneCurve& c, double& s, double& t) {
    const double lo = c.s_begin(), hi = c.s_end();
    for (int it = 0; it < 30; ++it) {
        const CurvePoint ps = c.at(s), pt = c.at(t);
        const Complex f = ps.p - pt.p;
        const Complex ts(std::cos(ps.theta), std::sin(ps.theta));
        const Complex tt(std::cos(pt.theta), std::sin(pt.theta));
        const double det = cross(ts, -tt);
        if (std::abs(det) < 1e-14) return false;
        // Solve ds * ts - dt * tt = -f.
        const double ds = cross(-f, -tt) / det;
        const double dt = cross(ts, -f) / det;
        s = std::clamp(s + ds, lo, hi);
        t = std::clamp(t + dt, lo, hi);
        if (std::abs(ds) + std::abs(dt) < 1e-13 * (1.0 + std::abs(s) + std::abs(t))) return true;
    }
    return std::abs(c.at(s).p - c.at(t).p) < 1e-10;
}

}  // namespace

IntersectionReport self_intersections(const PlaneCurve& curve, const IntersectionOptions& opts) {
    IntersectionReport out;
    if (curve.size() < 2) return out;
    const Params& prm = curve.params();
    const double unit_len = prm.magnitude() > 0.0 ? 1.0 / std::sqrt(prm.magnitude()) : 1.0;
    const double ds = opts.max_chord * unit_len;
    const PlaneCurve c = curve.resampled(ds);
    const auto& pts = c.points();
    const std::size_t nseg = pts.size() - 1;
    const bool closed = std::abs(pts.front().p - pts.back().p) < 1e-3 * ds;

    // Spatial hash of segment bounding boxes.
    const double cell = 2.0 * ds;
    struct Box {
        std::int64_t x0, x1, y0, y1;
    };
    auto key = [](std::int64_t ix, std::int64_t iy) {
        return (static_cast<std::uint64_t>(ix) << 32) ^ static_cast<std::uint32_t>(iy);
    };
    std::vector<Box> boxes(nseg);
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
    grid.reserve(nseg * 2);
    for (std::size_t i = 0; i < nseg; ++i) {
        const Complex a = pts[i].p, b = pts[i + 1].p;
        Box& bx = boxes[i];
        bx.x0 = static_cast<std::int64_t>(std::floor(std::min(a.real(), b.real()) / cell));
        bx.x1 = static_cast<std::int64_t>(std::floor(std::max(a.real(), b.real()) / cell));
        bx.y0 = static_cast<std::int64_t>(std::floor(std::min(a.imag(), b.imag()) / cell));
        bx.y1 = static_cast<std::int64_t>(std::floor(std::max(a.imag(), b.imag()) / cell));
        for (auto ix = bx.x0; ix <= bx.x1; ++ix)
            for (auto iy = bx.y0; iy <= bx.y1; ++iy) grid[key(ix, iy)].push_back(i);
    }

    std::vector<Candidate> candidates;
    for (const auto& [k, segs] : grid) {
        for (std::size_t u = 0; u < segs.size(); ++u)
            for (std::size_t v = u + 1; v < segs.size(); ++v) {
                std::size_t i = segs[u], j = segs[v];
                if (i > j) std::swap(i, j);
                if (j <= i + 1) continue;
                if (closed && i == 0 && j == nseg - 1) continue;
                // Test each pair once, in the lowest cell shared by both boxes.
                const std::int64_t cx = std::max(boxes[i].x0, boxes[j].x0);
                const std::int64_t cy = std::max(boxes[i].y0, boxes[j].y0);
                if (key(cx, cy) != k) continue;
                const Complex p = pts[i].p, r = pts[i + 1].p - p;
                const Complex q = pts[j].p, w = pts[j + 1].p - q;
                const double den = cross(r, w);
                if (std::abs(den) <= 1e-14 * std::abs(r) * std::abs(w)) continue;
                const double a = cross(q - p, w) / den;
                const double b = cross(q - p, r) / den;
                // Half-open so a crossing through a shared vertex is counted once.
                if (a >= 0.0 && a < 1.0 && b >= 0.0 && b < 1.0) candidates.push_back({i, j, a, b});
            }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& x, const Candidate& y) { return x.i < y.i || (x.i == y.i && x.j < y.j); });

    for (const Candidate& cand : candidates) {
        double s = pts[cand.i].s + cand.a * (pts[cand.i + 1].s - pts[cand.i].s);
        double t = pts[cand.j].s + cand.b * (pts[cand.j + 1].s - pts[cand.j].s);
        const double s0 = s, t0 = t;
        DoublePoint d;
        const bool ok = refine(curve, s, t);
        if (!ok || std::abs(s - s0) > 4.0 * ds || std::abs(t - t0) > 4.0 * ds) {
            s = s0;
            t = t0;
        }
        const CurvePoint ps = curve.at(s), pt = curve.at(t);
        d.s1 = std::min(s, t);
        d.s2 = std::max(s, t);
        d.point = 0.5 * (ps.p + pt.p);
        d.sin_angle = s < t ? std::sin(pt.theta - ps.theta) : std::sin(ps.theta - pt.theta);
        d.resolved = ok && std::abs(d.sin_angle) >= opts.min_sin_angle;
        out.crossings.push_back(d);
    }
    std::sort(out.crossings.begin(), out.crossings.end(),
              [](const DoublePoint& a, const DoublePoint& b) {
                  return a.s1 < b.s1 || (a.s1 == b.s1 && a.s2 < b.s2);
              });
    // A crossing exactly at a resampling vertex can be reported by two segment pairs.
    auto same = [&](const DoublePoint& a, const DoublePoint& b) {
        return std::abs(a.s1 - b.s1) < 1e-3 * ds && std::abs(a.s2 - b.s2) < 1e-3 * ds;
    };
    out.crossings.erase(std::unique(out.crossings.begin(), out.crossings.end(), same),
                        out.crossings.end());
    out.unresolved = static_cast<std::size_t>(std::count_if(
        out.crossings.begin(), out.crossings.end(), [](const DoublePoint& d) { return !d.resolved; }));

    std::vector<double> params;
    for (const DoublePoint& d : out.crossings) {
        params.push_back(d.s1);
        params.push_back(d.s2);
    }
    std::sort(params.begin(), params.end());

    for (const DoublePoint& d : out.crossings) {
        if (!d.resolved) continue;
        const double gap = 1e-9 * (1.0 + std::abs(d.s2));
        const auto lo = std::upper_bound(params.begin(), params.end(), d.s1 + gap);
        const auto hi = std::lower_bound(params.begin(), params.end(), d.s2 - gap);
        if (lo < hi) continue;  // another double point lies on the arc

        const double coarse = shoelace(loop_polygon(curve, d.s1, d.s2, ds));
        const double fine = shoelace(loop_polygon(curve, d.s1, d.s2, 0.5 * ds));
        const double signed_area = (4.0 * fine - coarse) / 3.0;

        const double th1 = curve.at(d.s1).theta, th2 = curve.at(d.s2).theta;
        LoopReport loop;
        loop.crossing = d;
        loop.counterclockwise = signed_area > 0.0;
        // Exterior turning angle at the corner, from the incoming to the outgoing tangent.
        const double turn =
            loop.counterclockwise ? std::remainder(th1 - th2, 2.0 * pi) : std::remainder(th2 - th1, 2.0 * pi);
        loop.alpha = pi - turn;
        loop.enclosed_area = std::abs(signed_area);
        loop.curvature_integral = loop.counterclockwise ? th2 - th1 : th1 - th2;
        if (prm.B < 0.0) loop.predicted_area = -(pi + loop.alpha) / (2.0 * prm.B);
        out.loops.push_back(loop);
    }
    return out;
}

}  // namespace csf
