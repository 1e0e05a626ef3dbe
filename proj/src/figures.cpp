#include "csf/figures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csf/flow.hpp"
#include "csf/solvers.hpp"

namespace csf {

namespace {

constexpr double kSettle = 1e-3;

PlaneCurve open_curve(const Params& p, PhaseState init, double span, double radius) {
    IntegrateOptions o;
    o.tol = 1e-11;
    Trajectory t = integrate(p, init, -span, span, o);
    if (p.B < 0.0) t = trim_settled(t, kSettle);
    return clip_to_disk(reconstruct(t), radius);
}

PlaneCurve comet_curve(const Params& p, double radius) {
    const CometResult c = find_comet_spiral(p);
    return clip_to_disk(reconstruct(trim_settled(c.shot.trajectory, kSettle)), radius);
}

PlaneCurve al_curve(int p, int q) { return reconstruct(find_abresch_langer(p, q).shot.trajectory); }

struct Entry {
    FigureSpec spec;
    std::vector<PlaneCurve> (*build)();
};

const std::vector<Entry>& entries() {
    static const std::vector<Entry> list = {
        {{"grim-reaper", "the translating Grim Reaper", {0, 0}, "scale=1 |u|<=1.5"},
         [] { return std::vector<PlaneCurve>{grim_reaper(1.0, 801, 1.5)}; }},
        {{"graf1", "an expander asymptotic to a cone", {0, 1}, "x0=1 y0=0 radius=8"},
         [] { return std::vector<PlaneCurve>{clip_to_disk(reconstruct(solve_expander({0, 1}, 1.0).trajectory), 8.0)}; }},
        {{"graf2", "expanders of increasing distance to the origin", {0, 1},
          "x0 in {0.25,0.5,1,2,4} y0=0 radius=8"},
         [] {
             std::vector<PlaneCurve> out;
             for (double x0 : {0.25, 0.5, 1.0, 2.0, 4.0})
                 out.push_back(clip_to_disk(reconstruct(solve_expander({0, 1}, x0).trajectory), 8.0));
             return out;
         }},
        {{"AL1", "Abresch-Langer curve p=2 q=3", {0, -1}, "p=2 q=3"},
         [] { return std::vector<PlaneCurve>{al_curve(2, 3)}; }},
        {{"AL2", "Abresch-Langer curve p=7 q=10", {0, -1}, "p=7 q=10"},
         [] { return std::vector<PlaneCurve>{al_curve(7, 10)}; }},
        {{"AL3", "Abresch-Langer curve p=20 q=31", {0, -1}, "p=20 q=31"},
         [] { return std::vector<PlaneCurve>{al_curve(20, 31)}; }},
        {{"AL4", "Abresch-Langer curve with large p and q", {0, -1}, "p=53 q=90"},
         [] { return std::vector<PlaneCurve>{al_curve(53, 90)}; }},
        {{"yin-yang", "the symmetric rotator", {1, 0}, "x0=0 y0=0 span=80 radius=6"},
         [] { return std::vector<PlaneCurve>{open_curve({1, 0}, {0, 0}, 80, 6)}; }},
        {{"A1B0b3", "a rotator whose tip approaches a Grim Reaper", {1, 0}, "x0=0 y0=3 span=80 radius=6"},
         [] { return std::vector<PlaneCurve>{open_curve({1, 0}, {0, 3}, 80, 6)}; }},
        {{"A1B025-symmetric", "the symmetric rotating expander", {1, 0.25},
          "x0=0 y0=0 span=80 radius=8"},
         [] { return std::vector<PlaneCurve>{open_curve({1, 0.25}, {0, 0}, 80, 8)}; }},
        {{"A1B025b3", "a rotating expander thinning away from the origin", {1, 0.25},
          "x0=0 y0=3 span=80 radius=8"},
         [] { return std::vector<PlaneCurve>{open_curve({1, 0.25}, {0, 3}, 80, 8)}; }},
        {{"A1Bm005-symmetric", "the symmetric rotating shrinker near B=0", {1, -0.05},
          "x0=0 y0=0 span=300 settle=1e-3"},
         [] { return std::vector<PlaneCurve>{open_curve({1, -0.05}, {0, 0}, 300, 1e9)}; }},
        {{"A1Bm005b8", "a rotating shrinker spiralling in from outside the circle", {1, -0.05},
          "x0=0 y0=8 span=300 settle=1e-3"},
         [] { return std::vector<PlaneCurve>{open_curve({1, -0.05}, {0, 8}, 300, 1e9)}; }},
        {{"comet-0.05", "the comet spiral", {1, -0.05}, "comet radius=3/sqrt(-B) settle=1e-3"},
         [] { return std::vector<PlaneCurve>{comet_curve({1, -0.05}, 3.0 / std::sqrt(0.05))}; }},
        {{"A1Bm025-symmetric", "the symmetric rotating shrinker", {1, -0.25},
          "x0=0 y0=0 span=300 settle=1e-3"},
         [] { return std::vector<PlaneCurve>{open_curve({1, -0.25}, {0, 0}, 300, 1e9)}; }},
        {{"A1Bm025b15", "a type-1 rotating shrinker with loops", {1, -0.25},
          "x0=0 y0=1.5 span=300 settle=1e-3"},
         [] { return std::vector<PlaneCurve>{open_curve({1, -0.25}, {0, 1.5}, 300, 1e9)}; }},
        {{"comet-0.25", "the comet spiral", {1, -0.25}, "comet radius=3/sqrt(-B) settle=1e-3"},
         [] { return std::vector<PlaneCurve>{comet_curve({1, -0.25}, 3.0 / std::sqrt(0.25))}; }},
        {{"A1Bm5-symmetric", "the symmetric rotating shrinker far from B=0", {1, -5},
          "x0=0 y0=0 span=300 settle=1e-3"},
         [] { return std::vector<PlaneCurve>{open_curve({1, -5}, {0, 0}, 300, 1e9)}; }},
        {{"comet-5", "the comet spiral far from B=0", {1, -5}, "comet radius=3/sqrt(-B) settle=1e-3"},
         [] { return std::vector<PlaneCurve>{comet_curve({1, -5}, 3.0 / std::sqrt(5.0))}; }},
    };
    return list;
}

}  // namespace

const std::vector<FigureSpec>& figure_catalog() {
    static const std::vector<FigureSpec> specs = [] {
        std::vector<FigureSpec> out;
        for (const Entry& e : entries()) out.push_back(e.spec);
        return out;
    }();
    return specs;
}

Figure make_figure(const std::string& name) {
    for (const Entry& e : entries())
        if (e.spec.name == name) return {e.spec, e.build()};
    std::string known;
    for (const Entry& e : entries()) known += (known.empty() ? "" : ", ") + e.spec.name;
    throw DomainError("unknown figure '" + name + "'; known figures: " + known);
}

FigureSignature figure_signature(const Figure& f) {
    FigureSignature sig;
    sig.x_min = sig.y_min = INFINITY;
    sig.x_max = sig.y_max = -INFINITY;
    for (const PlaneCurve& c : f.curves) {
        for (const CurvePoint& p : c.points()) {
            sig.x_min = std::min(sig.x_min, p.p.real());
            sig.x_max = std::max(sig.x_max, p.p.real());
            sig.y_min = std::min(sig.y_min, p.p.imag());
            sig.y_max = std::max(sig.y_max, p.p.imag());
        }
        sig.winding.push_back((c.points().back().theta - c.points().front().theta) /
                              (2.0 * std::numbers::pi));
        const IntersectionReport r = self_intersections(c);
        sig.crossings += r.crossings.size();
        sig.unresolved += r.unresolved;
        for (const LoopReport& l : r.loops) sig.loop_areas.push_back(l.enclosed_area);
    }
    return sig;
}

PlaneCurve clip_to_disk(const PlaneCurve& c, double radius) {
    const auto& pts = c.points();
    if (pts.empty()) return c;
    const auto mid = std::lower_bound(pts.begin(), pts.end(), 0.0,
                                      [](const CurvePoint& p, double s) { return p.s < s; });
    std::size_t i0 = static_cast<std::size_t>(std::min(mid - pts.begin(),
                                                       static_cast<std::ptrdiff_t>(pts.size() - 1)));
    if (std::abs(pts[i0].p) > radius) throw DomainError("clip_to_disk: s = 0 lies outside the disk");
    std::size_t lo = i0, hi = i0;
    while (lo > 0 && std::abs(pts[lo - 1].p) <= radius) --lo;
    while (hi + 1 < pts.size() && std::abs(pts[hi + 1].p) <= radius) ++hi;
    if (lo == 0 && hi + 1 == pts.size()) return c;
    return PlaneCurve(c.params(), std::vector<CurvePoint>(pts.begin() + lo, pts.begin() + hi + 1));
}

}  // namespace csf
