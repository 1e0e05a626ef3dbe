#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "csf/flow.hpp"
#include "csf/solvers.hpp"

using namespace csf;
constexpr double pi = std::numbers::pi;

namespace {

PlaneCurve curve_of(const Params& p, PhaseState u, double span) {
    IntegrateOptions o;
    o.tol = 1e-12;
    return reconstruct(integrate(p, u, -span, span, o));
}

// Largest distance from a point of `a` to the polyline of `b`.
double directed_hausdorff(const PlaneCurve& a, const PlaneCurve& b) {
    double worst = 0.0;
    const auto& pb = b.points();
    for (const CurvePoint& q : a.points()) {
        double best = INFINITY;
        for (std::size_t i = 1; i < pb.size(); ++i) {
            const Complex d = pb[i].p - pb[i - 1].p;
            const double w = std::clamp(std::real((q.p - pb[i - 1].p) * std::conj(d)) / std::norm(d), 0.0, 1.0);
            best = std::min(best, std::abs(q.p - pb[i - 1].p - w * d));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

TEST_CASE("motions") {
    const Motion rot = motion_for({1, 0});
    CHECK(rot.f(2.5) == doctest::Approx(2.5));
    CHECK(rot.g(2.5) == 1.0);
    CHECK_FALSE(rot.t_max().has_value());

    const Motion shrink = motion_for({0, -1});
    CHECK(shrink.g(0.375) == doctest::Approx(0.5));
    CHECK(*shrink.t_max() == doctest::Approx(0.5));

    for (Params p : {Params{1, 0}, Params{0, -1}, Params{-2, 0.3}}) {
        const Motion m = motion_for(p);
        CHECK(m.f(0) == 0.0);
        CHECK(m.g(0) == 1.0);
        CHECK(m.H(0) == Complex(0, 0));
    }
    CHECK_THROWS_AS(motion_for({0, 0}), DomainError);
    const Motion tr = motion_for({0, 0}, Complex(0, 2));
    CHECK(tr.H(1.5) == Complex(0, 3));
    const Motion centered = motion_for({1, 1}, Complex(1, 0));
    REQUIRE(centered.recentering.has_value());
    CHECK(std::abs(*centered.recentering - Complex(-0.5, 0.5)) < 1e-15);
    CHECK(centered.H(3.0) == Complex(0, 0));
}

TEST_CASE("evolve") {
    SUBCASE("shrinking circle") {
        const PlaneCurve c = curve_of({0, -1}, {1, 0}, 7.0);
        const PlaneCurve e = evolve(c, motion_for({0, -1}), 0.375);
        for (const CurvePoint& q : e.points()) {
            CHECK(std::abs(q.p) == doctest::Approx(0.5).epsilon(1e-12));
            CHECK(q.k == doctest::Approx(2.0).epsilon(1e-12));
        }
        CHECK_THROWS_AS(evolve(c, motion_for({0, -1}), 0.5), DomainError);
    }
    SUBCASE("identity at t = 0") {
        const PlaneCurve c = curve_of({1, -0.25}, {0.2, 1}, 5.0);
        const PlaneCurve e = evolve(c, motion_for({1, -0.25}), 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) CHECK(e.points()[i].p == c.points()[i].p);
    }
    SUBCASE("yin-yang at t = pi is the curve turned by pi") {
        const PlaneCurve c = curve_of({1, 0}, {0, 0}, 30.0);
        const PlaneCurve e = evolve(c, motion_for({1, 0}), pi);
        // The symmetric rotator is invariant under X -> -X.
        CHECK(directed_hausdorff(e, c) < 1e-8);
        for (std::size_t i = 0; i < c.size(); i += 97) CHECK(std::abs(e.points()[i].p + c.points()[i].p) < 1e-12);
    }
}

TEST_CASE("group property") {
    for (Params p : {Params{1, -1}, Params{0.5, 0.75}, Params{-1, 0}}) {
        const Motion m = motion_for(p);
        const PlaneCurve c = curve_of(p, {0.4, -0.2}, 4.0);
        const double t1 = 0.13, t2 = 0.21;
        const PlaneCurve two = evolve(evolve(c, m, t1), m.shifted(t1), t2);
        const PlaneCurve one = evolve(c, m, t1 + t2);
        for (std::size_t i = 0; i < c.size(); ++i) {
            CHECK(std::abs(two.points()[i].p - one.points()[i].p) < 1e-10);
            CHECK(two.points()[i].k == doctest::Approx(one.points()[i].k).epsilon(1e-10));
        }
    }
}

TEST_CASE("evolved soliton is the reconstruction of the rescaled phase orbit") {
    // X(t) = g e^{if} X solves the soliton equation for (A, B) / g^2, with phase state
    // (x, y) / g, arc length g s and tangent angle theta + f.
    const Params p{1, -0.25};
    const PhaseState u{0.3, 1.1};
    const Motion m = motion_for(p);
    const double t = 0.7, g = m.g(t), f = m.f(t);
    const PlaneCurve evolved = evolve(curve_of(p, u, 6.0), m, t);
    IntegrateOptions o;
    o.tol = 1e-12;
    const Trajectory direct = integrate({p.A / (g * g), p.B / (g * g)}, {u.x / g, u.y / g}, -6 * g, 6 * g, o);
    const PlaneCurve rebuilt = reconstruct(direct);
    std::vector<CurvePoint> turned;
    for (const CurvePoint& q : rebuilt.points()) turned.push_back({q.s, std::polar(1.0, f) * q.p, q.theta + f, q.k});
    const PlaneCurve target(rebuilt.params(), std::move(turned));
    CHECK(directed_hausdorff(evolved, target) < 1e-5);
    CHECK(directed_hausdorff(target, evolved) < 1e-5);
    CHECK(soliton_residual(evolved) < 1e-10);
}

TEST_CASE("csf residual") {
    SUBCASE("unit circle") {
        const PlaneCurve c = curve_of({0, -1}, {1, 0}, 7.0);
        CHECK(csf_residual(c, motion_for({0, -1}), 0.0, 1e-4) <= 1e-8);
    }
    SUBCASE("line through the origin") {
        const PlaneCurve c = curve_of({1, -1}, {0, 0}, 0.1);
        std::vector<CurvePoint> line;
        for (int i = -50; i <= 50; ++i) line.push_back({i * 0.1, Complex(i * 0.1, 0.0), 0.0, 0.0});
        CHECK(csf_residual(PlaneCurve({0, 1}, line), motion_for({0, 1}), 0.3, 1e-3) <= 1e-10);
        (void)c;
    }
    SUBCASE("second order in dt") {
        const PlaneCurve c = curve_of({1, -0.25}, {0.2, 1.0}, 10.0);
        const Motion m = motion_for({1, -0.25});
        const double r1 = csf_residual(c, m, 0.1, 1e-2), r2 = csf_residual(c, m, 0.1, 5e-3);
        CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
    }
    SUBCASE("dt guard and singular time") {
        const PlaneCurve c = curve_of({0, -1}, {1, 0}, 1.0);
        CHECK_THROWS_AS(csf_residual(c, motion_for({0, -1}), 0.0, 1e-9), DomainError);
        CHECK_THROWS_AS(csf_residual(c, motion_for({0, -1}), 0.4999, 1e-3), DomainError);
    }
}

TEST_CASE("check_csf across the families") {
    const std::vector<std::pair<PlaneCurve, Motion>> cases = {
        {grim_reaper(1.0, 401), motion_for({0, 0}, Complex(0, 1))},
        {curve_of({0, 1}, {1, 0}, 6.0), motion_for({0, 1})},
        {reconstruct(find_abresch_langer(2, 3).shot.trajectory), motion_for({0, -1})},
        {curve_of({1, 0}, {0, 0}, 20.0), motion_for({1, 0})},
        {curve_of({1, 0.25}, {0, 0}, 20.0), motion_for({1, 0.25})},
        {curve_of({1, -1}, {0, 0.3}, 20.0), motion_for({1, -1})},
    };
    for (const auto& [c, m] : cases) {
        const CsfCheck chk = check_csf(c, m);
        CHECK(chk.passed);
        CHECK(chk.fine_residual <= 1e-6);
    }
}

TEST_CASE("Grim Reaper") {
    const PlaneCurve c = grim_reaper(1.0, 201);
    const CurvePoint v = c.at(0.0);
    CHECK(std::abs(v.p) < 1e-15);
    CHECK(v.k == doctest::Approx(1.0));
    // Between samples k comes from the interpolant.
    const CurvePoint q = c.at(std::atanh(std::sin(pi / 4)));
    CHECK(std::abs(q.k - std::sqrt(0.5)) <= 1e-6);
    for (double scale : {0.5, 1.0, 3.0}) {
        const Complex C(0.0, 1.0 / scale);
        for (const CurvePoint& a : grim_reaper(scale, 301).points()) {
            const Complex n = Complex(0, 1) * std::polar(1.0, a.theta);
            CHECK(std::abs(C.real() * n.real() + C.imag() * n.imag() - a.k) <= 1e-12);
            // The graph: y = -scale log cos(x / scale).
            CHECK(a.p.imag() == doctest::Approx(-scale * std::log(std::cos(a.p.real() / scale))).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(grim_reaper(1.0, 10, pi / 2), DomainError);
    CHECK_THROWS_AS(grim_reaper(-1.0, 10), DomainError);
}

TEST_CASE("loop area rate") {
    const Params p{1, -0.25};
    const Trajectory t = trim_settled(integrate(p, {0, 0.5}, -150, 150), 1e-3);
    const IntersectionReport r = self_intersections(reconstruct(t));
    REQUIRE_FALSE(r.loops.empty());
    for (const LoopReport& l : r.loops) {
        const double rate = loop_area_rate(l, p);
        CHECK(rate == doctest::Approx(-(pi + l.alpha)));
        CHECK(std::abs(l.curvature_integral - (pi + l.alpha)) <= 1e-4);
        // The enclosed area shrinks linearly to zero at the singular time.
        CHECK(l.enclosed_area + rate * (-1.0 / (2 * p.B)) == doctest::Approx(0.0).epsilon(1e-6).scale(l.enclosed_area));
    }
    LoopReport smooth;
    smooth.crossing.resolved = true;
    smooth.alpha = pi;
    smooth.curvature_integral = 2 * pi;
    CHECK(loop_area_rate(smooth, {0, -1}) == doctest::Approx(-2 * pi));
    CHECK_THROWS_AS(loop_area_rate(smooth, {0, 1}), DomainError);
    smooth.crossing.resolved = false;
    CHECK_THROWS_AS(loop_area_rate(smooth, {0, -1}), DomainError);
}
