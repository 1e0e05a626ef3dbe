#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "csf/solvers.hpp"
#include "oracles.hpp"

using namespace csf;
constexpr double pi = std::numbers::pi;

TEST_CASE("delta_theta limits and oracle") {
    CHECK(delta_theta(1.0001) == doctest::Approx(std::sqrt(2.0) * pi).epsilon(2e-3 / (std::sqrt(2.0) * pi)));
    const double d8 = delta_theta(8.0), d12 = delta_theta(12.0);
    CHECK(d8 > pi);
    CHECK(d8 < pi + 0.15);
    CHECK(d8 > d12);
    CHECK(std::abs(delta_theta(2.0) - oracle::shrinker_delta_theta(2.0)) <= 1e-7);
    CHECK(std::abs(delta_theta(5.5) - oracle::shrinker_delta_theta(5.5)) <= 1e-7);
    CHECK_THROWS_AS(delta_theta(1.0), DomainError);
    CHECK_THROWS_AS(delta_theta(0.5), DomainError);
}

TEST_CASE("delta_theta is decreasing and within (pi, sqrt2 pi)") {
    double prev = INFINITY;
    for (int i = 1; i <= 30; ++i) {
        const double r = 1.0 + 11.0 * i / 30.0;
        const double d = delta_theta(r);
        CHECK(d < prev);
        CHECK(d > pi);
        CHECK(d < std::sqrt(2.0) * pi);
        prev = d;
    }
}

TEST_CASE("r_max from the first integral matches the orbit") {
    const Trajectory t = integrate({0, -1}, {2.5, 0.0}, 0, 3);
    for (std::size_t i = 0; i < t.size(); i += 40) CHECK(shrinker_r_max(t.samples()[i].state()) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK_THROWS_AS(shrinker_r_max({0, 1}), DomainError);
}

TEST_CASE("Abresch-Langer curves") {
    SUBCASE("p=2 q=3 against the oracle") {
        const AbreschLangerResult al = find_abresch_langer(2, 3);
        CHECK(al.target == doctest::Approx(4 * pi / 3));
        CHECK(al.shot.residual <= 1e-9);
        CHECK(std::abs(oracle::shrinker_delta_theta(al.shot.parameter) - al.target) <= 1e-9);
        CHECK(al.shot.bracket_lo <= al.shot.parameter);
        CHECK(al.shot.parameter <= al.shot.bracket_hi);
        CHECK(al.closure <= 1e-5);
    }
    SUBCASE("p=7 q=10 closes") {
        const AbreschLangerResult al = find_abresch_langer(7, 10);
        CHECK(al.target == doctest::Approx(1.4 * pi));
        CHECK(al.closure <= 1e-5);
    }
    SUBCASE("inadmissible ratios") {
        CHECK_THROWS_AS(find_abresch_langer(1, 2), DomainError);
        CHECK_THROWS_AS(find_abresch_langer(1, 1), DomainError);
        CHECK_THROWS_AS(find_abresch_langer(4, 6), DomainError);
        CHECK_THROWS_AS(find_abresch_langer(3, 4), DomainError);
    }
    SUBCASE("closure follows the delta_theta residual") {
        // A loose solve leaves a larger closure gap.
        const AbreschLangerResult tight = find_abresch_langer(2, 3, 1e-12);
        const AbreschLangerResult loose = find_abresch_langer(2, 3, 1e-7);
        CHECK(loose.closure >= tight.closure);
        CHECK(loose.closure <= 1e-4);
    }
}

TEST_CASE("classify round-trips Abresch-Langer curves") {
    for (auto [p, q] : {std::pair{2, 3}, std::pair{7, 10}}) {
        const AbreschLangerResult al = find_abresch_langer(p, q);
        const SolitonClass c = classify({0, -1}, {al.shot.parameter, 0.0});
        CHECK(c.tag == SolitonTag::AbreschLanger);
        REQUIRE(c.pq.has_value());
        CHECK(c.pq->first == p);
        CHECK(c.pq->second == q);
    }
    // Scaled problem: same orbit at B = -4.
    const AbreschLangerResult al = find_abresch_langer(2, 3);
    const SolitonClass c = classify({0, -4}, {2.0 * al.shot.parameter, 0.0});
    CHECK(c.tag == SolitonTag::AbreschLanger);
    CHECK(*c.limit_radius == doctest::Approx(0.5));
}

TEST_CASE("comet spiral") {
    SUBCASE("A=1 B=-1") {
        const CometResult c = find_comet_spiral({1, -1});
        CHECK(c.shot.bracket_hi - c.shot.bracket_lo <= 1e-10);
        CHECK(c.monotone);
        CHECK(c.tail_in_strip);
        CHECK(c.sink_distance <= 1e-6);
        CHECK(std::abs(c.tail_crossing_y - c.shot.parameter) <= 1e-8);
        // Tail: x -> 0 and y -> -infinity backwards.
        const Sample first = c.shot.trajectory.samples().front();
        CHECK(first.y < -50);
        CHECK(first.x > 0);
        CHECK(first.x < 0.05);
        // Ten times tighter integration keeps the same answer.
        CometOptions tight;
        tight.integration_tol = 1e-12;
        const CometResult t = find_comet_spiral({1, -1}, tight);
        CHECK(std::abs(t.shot.parameter - c.shot.parameter) <= 1e-8);
    }
    SUBCASE("reflection for A < 0") {
        const CometResult pos = find_comet_spiral({2, -1});
        const CometResult neg = find_comet_spiral({-2, -1});
        CHECK(neg.normalization.reflected);
        CHECK(neg.section_x == doctest::Approx(-pos.section_x));
        CHECK(neg.shot.parameter == doctest::Approx(pos.shot.parameter));
        const Sample a = pos.shot.trajectory.at(1.0), b = neg.shot.trajectory.at(1.0);
        CHECK(b.x == doctest::Approx(-a.x).epsilon(1e-9));
        CHECK(b.theta == doctest::Approx(-a.theta).epsilon(1e-9));
    }
    SUBCASE("no comet without rotation and shrinking") {
        CHECK_THROWS_AS(find_comet_spiral({0, -1}), DomainError);
        CHECK_THROWS_AS(find_comet_spiral({1, 0}), DomainError);
        CHECK_THROWS_AS(find_comet_spiral({1, 0.5}), DomainError);
    }
}

TEST_CASE("expanders") {
    double prev = 0.0;
    for (double x0 : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        const ExpanderResult e = solve_expander({0, 1}, x0);
        CHECK(e.total_curvature.converged);
        CHECK(e.total_curvature.value > prev);
        CHECK(e.total_curvature.value < pi);
        CHECK(std::abs(e.total_curvature.value - oracle::expander_total_curvature(x0)) <= 1e-6);
        prev = e.total_curvature.value;
    }
    CHECK(solve_expander({0, 1}, 1e-6).total_curvature.value < 1e-5);
    CHECK_THROWS_AS(solve_expander({1, 1}, 1.0), DomainError);
    CHECK_THROWS_AS(solve_expander({0, 1}, -1.0), DomainError);
}

TEST_CASE("rational recognition") {
    CHECK(rational_match(2.0 / 3.0, 200, 1e-12) == std::pair{2, 3});
    CHECK(rational_match(53.0 / 90.0, 200, 1e-12) == std::pair{53, 90});
    CHECK_FALSE(rational_match(std::sqrt(2.0) / 2.0, 200, 1e-12).has_value());
    CHECK_FALSE(rational_match(101.0 / 201.0, 200, 1e-12).has_value());
}

TEST_CASE("classify") {
    auto tag = [](Params p, PhaseState u) { return classify(p, u).tag; };
    CHECK(tag({0, -1}, {1, 0}) == SolitonTag::Circle);
    CHECK(tag({1, 0}, {0, 0}) == SolitonTag::Rotator);
    CHECK(tag({1, -1}, {0, 0.3}) == SolitonTag::RotatingShrinkerType1);
    CHECK(tag({0, 1}, {0.5, 0}) == SolitonTag::Expander);
    CHECK(tag({0, 1}, {0, 0}) == SolitonTag::Line);
    CHECK(tag({0, -1}, {0, 2}) == SolitonTag::Line);
    CHECK(tag({0, 0}, {1, 1}) == SolitonTag::Line);
    CHECK(tag({1, 0.25}, {0.3, 1}) == SolitonTag::RotatingExpander);
    CHECK(tag({0, -1}, {std::sqrt(2.0), 0.1}) == SolitonTag::DenseShrinker);
    CHECK(tag({1, -1}, {1, -1}) == SolitonTag::Circle);
    CHECK(tag({1, -1}, {0.5, 3}) == SolitonTag::RotatingShrinkerType1);
    CHECK(tag({1, -1}, {-0.5, 2}) == SolitonTag::RotatingShrinkerType1);

    const SolitonClass c = classify({1, -1}, {0, 0.3});
    CHECK(*c.limit_radius == doctest::Approx(1.0));
    CHECK_THROWS_AS(classify({NAN, 1}, {0, 0}), DomainError);

    SUBCASE("comet states") {
        const CometResult cm = find_comet_spiral({1, -0.25});
        for (double s : {-30.0, -2.0, 0.0, 3.0}) {
            const Sample a = cm.shot.trajectory.at(s);
            CHECK(tag({1, -0.25}, a.state()) == SolitonTag::CometSpiral);
        }
    }
    SUBCASE("stable under a tighter tolerance") {
        ClassifyOptions o;
        for (PhaseState u : {PhaseState{0.5, 3}, PhaseState{1.2, 0.1}, PhaseState{0.3, -2}}) {
            o.tol = 1e-9;
            const SolitonTag a = classify({1, -0.25}, u, o).tag;
            o.tol = 1e-10;
            CHECK(classify({1, -0.25}, u, o).tag == a);
        }
    }
    SUBCASE("short horizon is undetermined, not a guess") {
        ClassifyOptions o;
        o.horizon = 0.5;
        const CometResult cm = find_comet_spiral({1, -1});
        // Just off the comet: the backward run needs a long horizon to peel away.
        const Sample a = cm.shot.trajectory.at(2.0);
        // Step off the orbit along the normal of the vector field.
        const double nx = a.x * a.x - 1.0, ny = a.x * a.y + 1.0, len = std::hypot(nx, ny);
        const SolitonClass c = classify({1, -1}, {a.x + 1e-4 * nx / len, a.y + 1e-4 * ny / len}, o);
        CHECK(c.tag == SolitonTag::Undetermined);
        CHECK_FALSE(c.diagnostics.empty());
    }
}

TEST_CASE("type-1 ends converge to the limit circle") {
    for (double B : {-1.0, -0.25}) {
        const Params p{1, B};
        const double span = 400.0;
        const PlaneCurve c = reconstruct(integrate(p, {0, 0.7}, -span, span));
        const double r = 1.0 / std::sqrt(-B);
        CHECK(std::abs(std::abs(c.points().front().p) - r) <= 1e-4);
        CHECK(std::abs(std::abs(c.points().back().p) - r) <= 1e-4);
    }
}

TEST_CASE("trim_settled keeps unsettled arms") {
    const Trajectory t = integrate({1, -1}, {0, 0.7}, -100, 100);
    const Trajectory w = trim_settled(t, 1e-3);
    CHECK(w.s_begin() > t.s_begin());
    CHECK(w.s_end() < t.s_end());
    const Trajectory rot = integrate({1, 0}, {0, 0}, -10, 10);
    CHECK(trim_settled(rot).size() == rot.size());
}
