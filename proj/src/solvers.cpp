#include "csf/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>

namespace csf {

namespace {

constexpr double pi = std::numbers::pi;
const Params kShrinker{0.0, -1.0};

// Integrates the normalized shrinker from (r_max, 0) over `periods` excursions.
Trajectory shrinker_periods(double r_max, int periods, double tol) {
    IntegrateOptions o;
    o.tol = tol;
    o.events = {{EventKind::YZero, Crossing::Falling, periods, 0.0},
                {EventKind::YZero, Crossing::Rising, 0, 0.0}};
    // A period never exceeds a few times r_max in arc length; the event stops the run.
    const double span = periods * (20.0 + 4.0 * r_max);
    Trajectory t = integrate(kShrinker, {r_max, 0.0}, 0.0, span, o);
    int closing = 0;
    for (const Event& e : t.events())
        if (e.spec_index == 0) ++closing;
    if (closing < periods) throw SolverError("shrinker period not closed within the span");
    return t;
}

}  // namespace

std::string to_string(SolitonTag tag) {
    switch (tag) {
        case SolitonTag::Line: return "Line";
        case SolitonTag::GrimReaper: return "GrimReaper";
        case SolitonTag::Circle: return "Circle";
        case SolitonTag::Expander: return "Expander";
        case SolitonTag::AbreschLanger: return "AbreschLanger";
        case SolitonTag::DenseShrinker: return "DenseShrinker";
        case SolitonTag::Rotator: return "Rotator";
        case SolitonTag::RotatingExpander: return "RotatingExpander";
        case SolitonTag::RotatingShrinkerType1: return "RotatingShrinkerType1";
        case SolitonTag::CometSpiral: return "CometSpiral";
        case SolitonTag::Undetermined: return "Undetermined";
    }
    return "Undetermined";
}

double delta_theta(double r_max, double tol) {
    if (!(r_max > 1.0))
        throw DomainError("delta_theta: r_max must exceed 1 (the unit circle is the fixed point)");
    const Trajectory t = shrinker_periods(r_max, 1, tol);
    return t.samples().back().theta;
}

double shrinker_r_max(const PhaseState& u) {
    // |x| exp(-(x^2+y^2)/2) = C; solve log(x) - x^2/2 = log(C) on x >= 1.
    const double x = std::abs(u.x);
    if (x == 0.0) throw DomainError("shrinker_r_max: x = 0 is a straight line");
    const double log_c = std::log(x) - 0.5 * (u.x * u.x + u.y * u.y);
    auto f = [&](double r) { return std::log(r) - 0.5 * r * r - log_c; };
    double lo = 1.0, hi = 2.0;
    if (f(lo) <= 0.0) return 1.0;
    while (f(hi) > 0.0) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 4e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

AbreschLangerResult find_abresch_langer(int p, int q, double tol) {
    if (p <= 0 || q <= 0 || std::gcd(p, q) != 1)
        throw DomainError("find_abresch_langer: p and q must be coprime positive integers");
    const double ratio = static_cast<double>(p) / q;
    if (!(ratio > 0.5 && ratio < std::numbers::sqrt2 / 2.0))
        throw DomainError("find_abresch_langer: closed shrinkers exist only for 1/2 < p/q < "
                          "sqrt(2)/2; got " + std::to_string(p) + "/" + std::to_string(q));

    AbreschLangerResult out;
    out.p = p;
    out.q = q;
    out.target = 2.0 * pi * ratio;
    auto residual = [&](double r) { return delta_theta(r, tol) - out.target; };

    // Delta theta decreases from sqrt(2) pi at r_max -> 1 to pi as r_max -> infinity.
    int evals = 0;
    double lo = 1.0 + 1e-9, hi = 2.0;
    double f_lo = residual(lo), f_hi = residual(hi);
    evals += 2;
    while (f_hi > 0.0) {
        lo = hi;
        f_lo = f_hi;
        hi *= 1.5;
        if (hi > 36.0) throw SolverError("find_abresch_langer: target not bracketed below r_max = 36");
        f_hi = residual(hi);
        ++evals;
    }
    if (!(f_lo > 0.0)) throw SolverError("find_abresch_langer: target not bracketed near r_max = 1");

    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double f = residual(mid);
        ++evals;
        if (f > 0.0) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
            f_hi = f;
        }
    }
    // Secant polish inside the bracket; keep the best iterate.
    double best = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
    double f_best = std::min(std::abs(f_lo), std::abs(f_hi));
    double a = lo, fa = f_lo, b = hi, fb = f_hi;
    for (int i = 0; i < 3 && fb != fa; ++i) {
        const double c = b - fb * (b - a) / (fb - fa);
        if (!(c >= lo && c <= hi)) break;
        const double fc = residual(c);
        ++evals;
        if (std::abs(fc) < f_best) {
            best = c;
            f_best = std::abs(fc);
        }
        a = b;
        fa = fb;
        b = c;
        fb = fc;
    }

    out.shot.parameter = best;
    out.shot.bracket_lo = lo;
    out.shot.bracket_hi = hi;
    out.shot.residual = f_best;
    out.shot.evaluations = evals;
    out.shot.trajectory = shrinker_periods(best, q, tol);

    const PlaneCurve curve = reconstruct(out.shot.trajectory);
    out.closure = std::abs(curve.points().back().p - curve.points().front().p);
    return out;
}

namespace {

enum class Side { Left, Right, Undecided };

// Backward shot from (x_section, y0) in the normalized rotating shrinker: Left when it
// leaves the strip 0 < x < beta through x = 0, Right when it returns to x = beta.
Side shoot_backward(const Params& n, double x_section, double y0, double tol, double horizon) {
    IntegrateOptions o;
    o.tol = tol;
    o.events = {{EventKind::XZero, Crossing::Any, 1, 0.0},
                {EventKind::XEqualsBeta, Crossing::Any, 1, 0.0}};
    const Trajectory t = integrate(n, {x_section, y0}, -horizon, 0.0, o);
    for (const Event& e : t.events()) {
        if (e.spec_index == 0) return Side::Left;
        if (e.spec_index == 1) return Side::Right;
    }
    return Side::Undecided;
}

}  // namespace

CometResult find_comet_spiral(const Params& params, const CometOptions& opts) {
    if (params.A == 0.0 || !(params.B < 0.0))
        throw DomainError("find_comet_spiral: comet spirals exist only for A != 0 and B < 0");
    CometResult out;
    out.normalization = Normalization::for_params(params, true);
    const Params n = out.normalization.apply(params);
    out.normalized_params = n;
    const double beta = n.beta();
    const double xs = opts.section_fraction * beta;
    const double horizon = 1000.0;
    const double tol = opts.integration_tol;

    auto side = [&](double y0) { return shoot_backward(n, xs, y0, tol, horizon); };

    // Large y0 turns x down towards 0 at once; y0 < -1/xs turns it up towards beta.
    int evals = 0;
    double hi = 0.0, lo = -2.0 / xs;
    while (side(hi) != Side::Left) {
        hi = 2.0 * hi + 1.0;
        if (++evals > 60) throw SolverError("find_comet_spiral: no upper bracket");
    }
    while (side(lo) != Side::Right) {
        lo = 2.0 * lo - 1.0;
        if (++evals > 120) throw SolverError("find_comet_spiral: no lower bracket");
    }
    evals += 2;

    constexpr int grid = 16;
    int switches = 0;
    Side prev = Side::Right;
    for (int i = 0; i <= grid; ++i) {
        const Side s = side(lo + (hi - lo) * i / grid);
        ++evals;
        if (s == Side::Undecided) continue;
        if (s != prev) ++switches;
        prev = s;
    }
    out.monotone = switches == 1;

    while (hi - lo > opts.bracket_tol) {
        const double mid = 0.5 * (lo + hi);
        const Side s = side(mid);
        ++evals;
        if (s == Side::Undecided) throw SolverError("find_comet_spiral: undecided shot at y0 = " +
                                                    std::to_string(mid));
        (s == Side::Left ? hi : lo) = mid;
    }
    const double y_star = 0.5 * (lo + hi);

    // The tail attracts forward in s, so the comet itself is computed by integrating
    // forward from deep in the tail, where x ~ -1/y.
    const double y_start = -(opts.y_max + 10.0);
    IntegrateOptions o;
    o.tol = tol;
    o.events = {{EventKind::XLevel, Crossing::Rising, 0, xs},
                {EventKind::XZero, Crossing::Any, 1, 0.0}};
    const Trajectory tail = integrate(n, {-1.0 / y_start, y_start}, 0.0, opts.forward_span, o);
    const auto crossings = tail.events_of(EventKind::XLevel);
    if (crossings.empty() || !tail.events_of(EventKind::XZero).empty())
        throw SolverError("find_comet_spiral: tail run never reached the section");
    const Event& hit = crossings.front();

    out.tail_in_strip = true;
    bool below = false;
    std::vector<Sample> samples;
    samples.reserve(tail.size() + 1);
    for (const Sample& a : tail.samples()) {
        if (a.s < hit.s) {
            if (!(a.x > 0.0 && a.x < beta)) out.tail_in_strip = false;
            if (a.y < -opts.y_max) below = true;
            samples.push_back({a.s - hit.s, a.x, a.y, a.theta - hit.theta});
        } else {
            if (samples.empty() || samples.back().s < 0.0)
                samples.push_back({0.0, hit.state.x, hit.state.y, 0.0});
            if (a.s > hit.s) samples.push_back({a.s - hit.s, a.x, a.y, a.theta - hit.theta});
        }
    }
    out.tail_in_strip = out.tail_in_strip && below;
    std::vector<Event> events;
    for (const Event& e : tail.events())
        events.push_back({e.kind, e.s - hit.s, e.state, e.theta - hit.theta, e.spec_index});
    const Trajectory normalized(n, std::move(samples), std::move(events), tol);

    const Sample& last = normalized.samples().back();
    out.sink_distance = std::hypot(last.x - beta, last.y + 1.0 / beta);

    const double root = std::sqrt(out.normalization.scale);
    out.section_x = out.normalization.restore(PhaseState{xs, 0.0}).x;
    out.tail_crossing_y = hit.state.y * root;
    out.sink_distance *= root;
    out.shot.parameter = y_star * root;
    out.shot.bracket_lo = lo * root;
    out.shot.bracket_hi = hi * root;
    out.shot.residual = std::abs(hit.state.y - y_star) * root;
    out.shot.evaluations = evals;
    out.shot.trajectory = out.normalization.restore(normalized, params);
    return out;
}

ExpanderResult solve_expander(const Params& params, double x0, double tol, double tail_tol) {
    if (!(params.A == 0.0 && params.B > 0.0))
        throw DomainError("solve_expander: requires A = 0 and B > 0");
    if (!(x0 >= 0.0)) throw DomainError("solve_expander: x0 must be non-negative");
    const double root = std::sqrt(params.B);
    const double xn = x0 / root;
    double y_needed = 1.0;
    if (xn > 0.0) {
        const double log_c = std::log(xn) + 0.5 * xn * xn;
        const double arg = log_c + std::log(2.0 * std::sqrt(pi / 2.0) / tail_tol);
        y_needed = std::sqrt(2.0 * std::max(arg, 1.0));
    }
    // |dy/ds| >= 1 in rescaled units, so this span reaches |y| >= y_needed at both ends.
    const double span = y_needed / root;
    IntegrateOptions o;
    o.tol = tol;
    ExpanderResult out;
    out.trajectory = integrate(params, {x0, 0.0}, -span, span, o);
    out.total_curvature = total_curvature(out.trajectory);
    return out;
}

Trajectory trim_settled(const Trajectory& t, double tol) {
    const std::vector<FixedPoint> fps = fixed_points(t.params());
    if (fps.empty() || t.size() < 2) return t;
    auto settled = [&](const Sample& a) {
        for (const FixedPoint& fp : fps)
            if (std::hypot(a.x - fp.state.x, a.y - fp.state.y) <= tol * fp.state.norm()) return true;
        return false;
    };
    const auto& ss = t.samples();
    std::size_t lo = 0, hi = ss.size() - 1;
    while (lo < hi && settled(ss[lo])) ++lo;
    while (hi > lo && settled(ss[hi])) --hi;
    if (lo == 0 && hi == ss.size() - 1) return t;
    return slice(t, ss[lo].s, ss[hi].s);
}

std::optional<std::pair<int, int>> rational_match(double ratio, int max_q, double tol) {
    long long h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
    double rest = ratio;
    for (int iter = 0; iter < 64; ++iter) {
        const double a = std::floor(rest);
        const long long ai = static_cast<long long>(a);
        const long long h = ai * h_prev + h_prev2;
        const long long k = ai * k_prev + k_prev2;
        if (k > max_q) break;
        if (std::abs(ratio - static_cast<double>(h) / k) <= tol * k)
            return std::make_pair(static_cast<int>(h), static_cast<int>(k));
        h_prev2 = h_prev;
        h_prev = h;
        k_prev2 = k_prev;
        k_prev = k;
        const double frac = rest - a;
        if (frac < 1e-15) break;
        rest = 1.0 / frac;
    }
    return std::nullopt;
}

namespace {

SolitonClass classify_shrinker(const Params& p, const PhaseState& init, const ClassifyOptions& opts) {
    SolitonClass c;
    c.limit_radius = 1.0 / std::sqrt(-p.B);
    const Normalization norm = Normalization::for_params(p, false);
    PhaseState u = norm.apply(init);
    if (u.x == 0.0) {
        c.tag = SolitonTag::Line;
        c.diagnostics = "x0 = 0: straight line through the origin";
        return c;
    }
    if (u.x < 0.0) u = {-u.x, -u.y};
    if (std::abs(u.x - 1.0) <= opts.tol && std::abs(u.y) <= opts.tol) {
        c.tag = SolitonTag::Circle;
        c.diagnostics = "fixed point of the shrinker system";
        return c;
    }
    // x_max of the orbit is where y crosses 0 downwards.
    IntegrateOptions o;
    o.tol = 1e-12;
    o.events = {{EventKind::YZero, Crossing::Falling, 1, 0.0}};
    const Trajectory t = integrate(kShrinker, u, 0.0, opts.horizon, o);
    const auto hits = t.events_of(EventKind::YZero);
    if (hits.empty()) {
        c.tag = SolitonTag::Undetermined;
        c.diagnostics = "no period closed within the horizon";
        return c;
    }
    const double r_max = hits.front().state.x;
    const double dt = delta_theta(r_max, 1e-12);
    c.delta_theta = dt;
    if (const auto pq = rational_match(dt / (2.0 * pi), opts.max_denominator, opts.tol)) {
        c.tag = SolitonTag::AbreschLanger;
        c.pq = pq;
        c.diagnostics = "delta_theta / 2pi = " + std::to_string(pq->first) + "/" +
                        std::to_string(pq->second);
    } else {
        c.tag = SolitonTag::DenseShrinker;
        c.diagnostics = "delta_theta / 2pi has no convergent with q <= " +
                        std::to_string(opts.max_denominator);
    }
    return c;
}

// Distance from u to the phase curve of t: nearest chord, then refined on the interpolant.
double distance_to_trajectory(const Trajectory& t, const PhaseState& u) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t at = 1;
    const auto& ss = t.samples();
    for (std::size_t i = 1; i < ss.size(); ++i) {
        const double ax = ss[i - 1].x, ay = ss[i - 1].y;
        const double dx = ss[i].x - ax, dy = ss[i].y - ay;
        const double len2 = dx * dx + dy * dy;
        double w = len2 > 0.0 ? ((u.x - ax) * dx + (u.y - ay) * dy) / len2 : 0.0;
        w = std::clamp(w, 0.0, 1.0);
        const double d = std::hypot(u.x - ax - w * dx, u.y - ay - w * dy);
        if (d < best) {
            best = d;
            at = i;
        }
    }
    if (ss.size() < 2) return best;
    auto dist = [&](double s) {
        const Sample a = t.at(s);
        return std::hypot(a.x - u.x, a.y - u.y);
    };
    double lo = ss[at > 1 ? at - 2 : 0].s, hi = ss[std::min(at + 1, ss.size() - 1)].s;
    for (int it = 0; it < 100 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (dist(m1) < dist(m2))
            hi = m2;
        else
            lo = m1;
    }
    return std::min(best, dist(0.5 * (lo + hi)));
}

SolitonClass classify_rotating_shrinker(const Params& p, const PhaseState& init,
                                        const ClassifyOptions& opts) {
    SolitonClass c;
    c.limit_radius = 1.0 / std::sqrt(-p.B);
    const Normalization norm = Normalization::for_params(p, true);
    const Params n = norm.apply(p);
    const double beta = n.beta();
    PhaseState u = norm.apply(init);
    for (const FixedPoint& fp : fixed_points(n)) {
        if (std::hypot(u.x - fp.state.x, u.y - fp.state.y) <= opts.tol * (1.0 + beta)) {
            c.tag = SolitonTag::Circle;
            c.diagnostics = "fixed point: circle of radius 1/sqrt(-B)";
            return c;
        }
    }
    if (u.x == 0.0) {
        c.tag = SolitonTag::RotatingShrinkerType1;
        c.diagnostics = "curvature vanishes at s = 0";
        return c;
    }
    // s -> -(x(-s), y(-s)) traverses the same curve backwards.
    if (u.x < 0.0) u = {-u.x, -u.y};

    const CometResult comet = find_comet_spiral(n);
    const Trajectory& ct = comet.shot.trajectory;
    const double dist = distance_to_trajectory(ct, u);
    if (dist <= opts.comet_distance) {
        c.tag = SolitonTag::CometSpiral;
        char buf[96];
        std::snprintf(buf, sizeof buf, "phase state lies on the comet trajectory (distance %.3g)", dist);
        c.diagnostics = buf;
        return c;
    }

    const double y_max = 50.0;
    IntegrateOptions o;
    o.tol = 1e-11;
    o.events = {{EventKind::XZero, Crossing::Any, 1, 0.0},
                {EventKind::YLevel, Crossing::Rising, 1, -y_max}};
    const Trajectory t = integrate(n, u, -opts.horizon, 0.0, o);
    for (const Event& e : t.events()) {
        if (e.spec_index == 0) {
            c.tag = SolitonTag::RotatingShrinkerType1;
            c.diagnostics = "backward branch crosses x = 0";
            return c;
        }
        if (e.spec_index == 1 && e.state.x > 0.0 && e.state.x < beta) {
            c.tag = SolitonTag::CometSpiral;
            c.diagnostics = "backward branch confined to the strip 0 < x < beta below y = -50";
            return c;
        }
    }
    c.tag = SolitonTag::Undetermined;
    c.diagnostics = "backward branch neither crossed x = 0 nor descended the comet tail "
                    "within the horizon";
    return c;
}

}  // namespace

SolitonClass classify(const Params& p, const PhaseState& init, const ClassifyOptions& opts) {
    if (!std::isfinite(p.A) || !std::isfinite(p.B) || !std::isfinite(init.x) ||
        !std::isfinite(init.y))
        throw DomainError("classify: non-finite input");
    SolitonClass c;
    if (p.degenerate()) {
        c.tag = SolitonTag::Line;
        c.diagnostics = "A = B = 0: only straight lines solve the phase route";
        return c;
    }
    if (p.A == 0.0 && p.B > 0.0) {
        c.tag = init.x == 0.0 ? SolitonTag::Line : SolitonTag::Expander;
        return c;
    }
    if (p.A == 0.0) return classify_shrinker(p, init, opts);
    if (p.B == 0.0) {
        c.tag = SolitonTag::Rotator;
        return c;
    }
    if (p.B > 0.0) {
        c.tag = SolitonTag::RotatingExpander;
        return c;
    }
    return classify_rotating_shrinker(p, init, opts);
}

}  // namespace csf
