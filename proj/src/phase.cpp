#include "csf/phase.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

namespace csf {

double Params::beta() const { return B < 0.0 ? std::sqrt(-B) : 0.0; }

double Params::magnitude() const { return std::hypot(A, B); }

double PhaseState::norm() const { return std::hypot(x, y); }

PhaseState rhs(const Params& p, const PhaseState& u) {
    return {u.x * u.y + p.A, -u.x * u.x - p.B};
}

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::YZero: return "y-zero-crossing";
        case EventKind::XZero: return "x-zero-crossing";
        case EventKind::XEqualsBeta: return "x-equals-beta";
        case EventKind::XLevel: return "x-level";
        case EventKind::YLevel: return "y-level";
        case EventKind::NormExceedsThreshold: return "norm-exceeds-threshold";
    }
    return "unknown";
}

std::string to_string(FixedPointType t) {
    switch (t) {
        case FixedPointType::SinkSpiral: return "sink-spiral";
        case FixedPointType::SinkNode: return "sink-node";
        case FixedPointType::SinkDegenerateNode: return "sink-degenerate-node";
        case FixedPointType::SourceSpiral: return "source-spiral";
        case FixedPointType::SourceNode: return "source-node";
        case FixedPointType::SourceDegenerateNode: return "source-degenerate-node";
        case FixedPointType::Center: return "center";
    }
    return "unknown";
}

namespace {

using State = std::array<double, 3>;  // x, y, theta

State field(const Params& p, const State& u) {
    return {u[0] * u[1] + p.A, -u[0] * u[0] - p.B, u[0]};
}

State second_derivative(const Params& p, const State& u) {
    const State d = field(p, u);
    return {d[0] * u[1] + u[0] * d[1], -2.0 * u[0] * d[0], d[0]};
}

// Dormand-Prince 5(4).
struct StepResult {
    State u;
    State k_end;
    State err;
};

StepResult dopri_step(const Params& p, const State& u, const State& k1, double h) {
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    State t{}, k2, k3, k4, k5, k6;
    for (int i = 0; i < 3; ++i) t[i] = u[i] + h * a21 * k1[i];
    k2 = field(p, t);
    for (int i = 0; i < 3; ++i) t[i] = u[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = field(p, t);
    for (int i = 0; i < 3; ++i) t[i] = u[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = field(p, t);
    for (int i = 0; i < 3; ++i)
        t[i] = u[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = field(p, t);
    for (int i = 0; i < 3; ++i)
        t[i] = u[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = field(p, t);

    StepResult r;
    for (int i = 0; i < 3; ++i)
        r.u[i] = u[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    r.k_end = field(p, r.u);
    for (int i = 0; i < 3; ++i)
        r.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                        e7 * r.k_end[i]);
    return r;
}

double event_value(const EventSpec& e, const Params& p, const State& u) {
    switch (e.kind) {
        case EventKind::YZero: return u[1];
        case EventKind::XZero: return u[0];
        case EventKind::XEqualsBeta: return u[0] - p.beta();
        case EventKind::XLevel: return u[0] - e.level;
        case EventKind::YLevel: return u[1] - e.level;
        case EventKind::NormExceedsThreshold: return std::hypot(u[0], u[1]) - e.level;
    }
    return 0.0;
}

// g0 at the step start, g1 at the end; dir is the sign of the step.
bool crosses(double g0, double g1, Crossing want, double dir) {
    const bool change = (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0);
    if (!change) return false;
    if (want == Crossing::Any) return true;
    const bool rising_in_s = dir > 0.0 ? g1 > g0 : g1 < g0;
    return want == Crossing::Rising ? rising_in_s : !rising_in_s;
}

struct BranchResult {
    std::vector<Sample> samples;  // ordered by |s|, starting at s = 0
    std::vector<Event> events;
};

BranchResult integrate_branch(const Params& p, const State& init, double s_end,
                              const IntegrateOptions& opts) {
    BranchResult out;
    out.samples.push_back({0.0, init[0], init[1], init[2]});
    if (s_end == 0.0) return out;

    const double dir = s_end > 0.0 ? 1.0 : -1.0;
    const double kappa = std::sqrt(p.magnitude());
    const double length = 1.0 / kappa;
    const double h_max = opts.max_step * length;
    // Absolute floors per component. With A = 0 the curvature evolves multiplicatively
    // (x' = xy), so x gets pure relative control and keeps full precision near 0.
    const State floor{p.A == 0.0 ? 0.0 : kappa, kappa, 1.0};

    std::vector<EventSpec> specs = opts.events;
    specs.push_back({EventKind::NormExceedsThreshold, Crossing::Rising, 1, opts.norm_threshold});
    const int norm_index = static_cast<int>(specs.size()) - 1;
    std::vector<int> counts(specs.size(), 0);

    double s = 0.0;
    State u = init;
    State k1 = field(p, u);
    double h = std::min(1e-3 * length, h_max);
    double err_prev = 1e-4;
    std::size_t steps = 0;

    while (dir * (s_end - s) > 0.0) {
        if (++steps > opts.max_steps) throw SolverError("integrate: step budget exhausted");
        const double remaining = dir * (s_end - s);
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        const StepResult r = dopri_step(p, u, k1, dir * h);

        double err = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double sc =
                opts.tol * (std::max(std::abs(u[i]), std::abs(r.u[i])) + floor[i]);
            const double e = std::abs(r.err[i]);
            if (sc > 0.0)
                err = std::max(err, e / sc);
            else if (e > 0.0)
                err = std::numeric_limits<double>::infinity();
        }
        if (!std::isfinite(r.u[0]) || !std::isfinite(r.u[1]) || !std::isfinite(r.u[2]))
            err = std::numeric_limits<double>::infinity();

        if (err > 1.0) {
            const double fac =
                std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h *= fac;
            if (h < 1e-15 * (1.0 + std::abs(s)))
                throw SolverError("integrate: step size underflow");
            continue;
        }

        const double s_new = last ? s_end : s + dir * h;

        // Events inside (s, s_new], located by re-stepping from s with shorter steps.
        struct Hit {
            double sigma;
            std::size_t spec;
        };
        std::vector<Hit> hits;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const double g0 = event_value(specs[i], p, u);
            const double g1 = event_value(specs[i], p, r.u);
            if (!crosses(g0, g1, specs[i].direction, dir)) continue;
            auto g = [&](double sigma) {
                if (sigma <= 0.0) return g0;
                if (sigma >= h) return g1;
                return event_value(specs[i], p, dopri_step(p, u, k1, dir * sigma).u);
            };
            auto done = [&](double a, double b) { return std::abs(b - a) <= opts.event_tol; };
            std::uintmax_t iters = 200;
            const auto br = boost::math::tools::toms748_solve(g, 0.0, h, g0, g1, done, iters);
            hits.push_back({0.5 * (br.first + br.second), i});
        }
        std::sort(hits.begin(), hits.end(),
                  [](const Hit& a, const Hit& b) { return a.sigma < b.sigma; });

        bool stop = false;
        for (const Hit& hit : hits) {
            const double s_e = s + dir * hit.sigma;
            const State ue = hit.sigma >= h ? r.u : dopri_step(p, u, k1, dir * hit.sigma).u;
            const EventSpec& spec = specs[hit.spec];
            const int index = static_cast<int>(hit.spec) == norm_index
                                  ? -1
                                  : static_cast<int>(hit.spec);
            out.events.push_back({spec.kind, s_e, {ue[0], ue[1]}, ue[2], index});
            ++counts[hit.spec];
            if (spec.stop_after > 0 && counts[hit.spec] >= spec.stop_after) {
                if (hit.sigma > 0.0) out.samples.push_back({s_e, ue[0], ue[1], ue[2]});
                stop = true;
                break;
            }
        }
        if (stop) break;

        s = s_new;
        u = r.u;
        k1 = r.k_end;
        out.samples.push_back({s, u[0], u[1], u[2]});

        // PI step-size controller.
        const double e = std::max(err, 1e-10);
        double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
        fac = std::clamp(fac, 0.2, 5.0);
        err_prev = e;
        h = std::min(h * fac, h_max);
    }
    return out;
}

}  // namespace

Trajectory::Trajectory(Params params, std::vector<Sample> samples, std::vector<Event> events,
                       double tol)
    : params_(params), samples_(std::move(samples)), events_(std::move(events)), tol_(tol) {}

Sample Trajectory::at(double s) const {
    if (samples_.empty()) throw DomainError("Trajectory::at on empty trajectory");
    const double slack = 1e-12 * (1.0 + std::abs(s));
    if (s < s_begin() - slack || s > s_end() + slack)
        throw DomainError("Trajectory::at: arc length outside the computed span");
    s = std::clamp(s, s_begin(), s_end());
    if (samples_.size() == 1) return samples_.front();

    auto it = std::upper_bound(samples_.begin(), samples_.end(), s,
                               [](double v, const Sample& a) { return v < a.s; });
    if (it == samples_.end()) --it;
    if (it == samples_.begin()) ++it;
    const Sample& a = *(it - 1);
    const Sample& b = *it;
    const double h = b.s - a.s;
    if (h <= 0.0) return a;
    const double t = (s - a.s) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double h3 = 10 * t3 - 15 * t4 + 6 * t5;
    const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h5 = 0.5 * (t3 - 2 * t4 + t5);

    const State ua{a.x, a.y, a.theta}, ub{b.x, b.y, b.theta};
    const State va = field(params_, ua), vb = field(params_, ub);
    const State wa = second_derivative(params_, ua), wb = second_derivative(params_, ub);
    State out{};
    for (int i = 0; i < 3; ++i)
        out[i] = h0 * ua[i] + h1 * h * va[i] + h2 * h * h * wa[i] + h3 * ub[i] +
                 h4 * h * vb[i] + h5 * h * h * wb[i];
    return {s, out[0], out[1], out[2]};
}

std::vector<Event> Trajectory::events_of(EventKind kind) const {
    std::vector<Event> out;
    for (const Event& e : events_)
        if (e.kind == kind) out.push_back(e);
    return out;
}

bool Trajectory::truncated() const {
    return std::any_of(events_.begin(), events_.end(), [](const Event& e) {
        return e.kind == EventKind::NormExceedsThreshold;
    });
}

Trajectory integrate(const Params& p, const PhaseState& init, double s_lo, double s_hi,
                     const IntegrateOptions& opts) {
    if (p.degenerate())
        throw DomainError("integrate: (A, B) = (0, 0) has no phase-plane reconstruction");
    if (!std::isfinite(p.A) || !std::isfinite(p.B) || !std::isfinite(init.x) ||
        !std::isfinite(init.y))
        throw DomainError("integrate: non-finite input");
    if (!(opts.tol > 0.0) || !(opts.event_tol > 0.0))
        throw DomainError("integrate: tolerances must be positive");
    if (!(s_lo <= 0.0 && 0.0 <= s_hi))
        throw DomainError("integrate: span must satisfy s_lo <= 0 <= s_hi");

    const State u0{init.x, init.y, 0.0};
    BranchResult fwd = integrate_branch(p, u0, s_hi, opts);
    BranchResult bwd = integrate_branch(p, u0, s_lo, opts);

    std::vector<Sample> samples;
    samples.reserve(fwd.samples.size() + bwd.samples.size());
    for (auto it = bwd.samples.rbegin(); it != bwd.samples.rend(); ++it) samples.push_back(*it);
    samples.insert(samples.end(), fwd.samples.begin() + 1, fwd.samples.end());

    std::vector<Event> events = std::move(bwd.events);
    std::reverse(events.begin(), events.end());
    events.insert(events.end(), fwd.events.begin(), fwd.events.end());
    return Trajectory(p, std::move(samples), std::move(events), opts.tol);
}

std::optional<double> first_integral(const Params& p, const PhaseState& u, double theta) {
    if (p.A == 0.0 && p.B != 0.0) {
        const double c = std::abs(p.B);
        const double x = u.x / std::sqrt(c), y = u.y / std::sqrt(c);
        const double sign = p.B < 0.0 ? -1.0 : 1.0;
        return x * std::exp(sign * 0.5 * (x * x + y * y));
    }
    if (p.B == 0.0 && p.A != 0.0)
        return (u.x * u.x + u.y * u.y) / (p.A * p.A) - 2.0 / p.A * theta;
    return std::nullopt;
}

std::vector<FixedPoint> fixed_points(const Params& p) {
    std::vector<FixedPoint> out;
    if (!(p.B < 0.0)) return out;
    const double beta = p.beta();
    for (double x : {beta, -beta}) {
        const double y = -p.A / x;
        // Jacobian [[y, x], [-2x, 0]]: trace y, determinant 2x^2.
        const double tr = y;
        const double det = 2.0 * x * x;
        double disc = tr * tr - 4.0 * det;
        const bool degenerate = std::abs(disc) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                                      (tr * tr + 4.0 * det);
        if (degenerate) disc = 0.0;
        FixedPoint fp;
        fp.state = {x, y};
        if (disc >= 0.0) {
            const double root = std::sqrt(disc);
            fp.eigenvalues = {Eigenvalue{0.5 * (tr + root), 0.0}, Eigenvalue{0.5 * (tr - root), 0.0}};
        } else {
            const double root = std::sqrt(-disc);
            fp.eigenvalues = {Eigenvalue{0.5 * tr, 0.5 * root}, Eigenvalue{0.5 * tr, -0.5 * root}};
        }
        if (tr == 0.0) {
            fp.type = FixedPointType::Center;
        } else {
            const bool sink = tr < 0.0;
            if (degenerate)
                fp.type = sink ? FixedPointType::SinkDegenerateNode
                               : FixedPointType::SourceDegenerateNode;
            else if (disc < 0.0)
                fp.type = sink ? FixedPointType::SinkSpiral : FixedPointType::SourceSpiral;
            else
                fp.type = sink ? FixedPointType::SinkNode : FixedPointType::SourceNode;
        }
        out.push_back(fp);
    }
    return out;
}

Normalization Normalization::for_params(const Params& p, bool reflect_to_positive_A) {
    if (p.degenerate()) throw DomainError("Normalization: (A, B) = (0, 0)");
    Normalization n;
    n.scale = p.A != 0.0 ? std::abs(p.A) : std::abs(p.B);
    n.reflected = reflect_to_positive_A && p.A < 0.0;
    return n;
}

Params Normalization::apply(const Params& p) const {
    return {(reflected ? -p.A : p.A) / scale, p.B / scale};
}

PhaseState Normalization::apply(const PhaseState& u) const {
    const double r = std::sqrt(scale);
    return {(reflected ? -u.x : u.x) / r, u.y / r};
}

PhaseState Normalization::restore(const PhaseState& u) const {
    const double r = std::sqrt(scale);
    return {(reflected ? -u.x : u.x) * r, u.y * r};
}

Trajectory Normalization::restore(const Trajectory& t, const Params& original) const {
    const double r = std::sqrt(scale);
    const double sign = reflected ? -1.0 : 1.0;
    std::vector<Sample> samples;
    samples.reserve(t.size());
    for (const Sample& a : t.samples())
        samples.push_back({a.s / r, sign * a.x * r, a.y * r, sign * a.theta});
    std::vector<Event> events;
    for (const Event& e : t.events())
        events.push_back({e.kind, e.s / r, restore(e.state), sign * e.theta, e.spec_index});
    return Trajectory(original, std::move(samples), std::move(events), t.tol());
}

Trajectory slice(const Trajectory& t, double s_lo, double s_hi) {
    s_lo = std::max(s_lo, t.s_begin());
    s_hi = std::min(s_hi, t.s_end());
    if (!(s_lo < s_hi)) throw DomainError("slice: empty arc-length window");
    std::vector<Sample> samples{t.at(s_lo)};
    for (const Sample& a : t.samples())
        if (a.s > s_lo && a.s < s_hi) samples.push_back(a);
    samples.push_back(t.at(s_hi));
    std::vector<Event> events;
    for (const Event& e : t.events())
        if (e.s >= s_lo && e.s <= s_hi) events.push_back(e);
    return Trajectory(t.params(), std::move(samples), std::move(events), t.tol());
}

Trajectory reversed(const Trajectory& t) {
    std::vector<Sample> samples;
    samples.reserve(t.size());
    for (auto it = t.samples().rbegin(); it != t.samples().rend(); ++it)
        samples.push_back({-it->s, -it->x, -it->y, it->theta});
    std::vector<Event> events;
    for (auto it = t.events().rbegin(); it != t.events().rend(); ++it)
        events.push_back({it->kind, -it->s, {-it->state.x, -it->state.y}, it->theta,
                          it->spec_index});
    return Trajectory(t.params(), std::move(samples), std::move(events), t.tol());
}

}  // namespace csf
