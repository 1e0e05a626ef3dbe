#include "csf/flow.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace csf {

double Motion::f(double t) const {
    if (params.B == 0.0) return params.A * t;
    return params.A / (2.0 * params.B) * std::log1p(2.0 * params.B * t);
}

double Motion::g(double t) const { return std::sqrt(1.0 + 2.0 * params.B * t); }

Complex Motion::H(double t) const {
    if (params.degenerate() && velocity) return *velocity * t;
    return {0.0, 0.0};
}

std::optional<double> Motion::t_max() const {
    if (params.B < 0.0) return -1.0 / (2.0 * params.B);
    return std::nullopt;
}

double Motion::time_scale() const {
    if (params.degenerate()) {
        const double v = velocity ? std::abs(*velocity) : 0.0;
        return v > 0.0 ? 1.0 / (v * v) : 1.0;
    }
    return 1.0 / params.magnitude();
}

Motion Motion::shifted(double t1) const {
    Motion m = *this;
    const double d = 1.0 + 2.0 * params.B * t1;
    m.params = {params.A / d, params.B / d};
    return m;
}

Motion motion_for(const Params& params, std::optional<Complex> velocity) {
    Motion m;
    m.params = params;
    if (params.degenerate()) {
        if (!velocity)
            throw DomainError("motion_for: A = B = 0 needs a translation velocity");
        m.velocity = velocity;
        return m;
    }
    if (velocity) {
        m.velocity = velocity;
        m.recentering = -*velocity / Complex(params.B, params.A);
    }
    return m;
}

namespace {

void check_time(const Motion& m, double t, const char* who) {
    if (!std::isfinite(t)) throw DomainError(std::string(who) + ": non-finite time");
    if (1.0 + 2.0 * m.params.B * t <= 0.0)
        throw DomainError(std::string(who) + ": t must stay below the singular time -1/(2B)");
}

}  // namespace

PlaneCurve evolve(const PlaneCurve& curve, const Motion& motion, double t) {
    check_time(motion, t, "evolve");
    const double g = motion.g(t), f = motion.f(t);
    const Complex rot = std::polar(g, f), h = motion.H(t);
    std::vector<CurvePoint> pts;
    pts.reserve(curve.size());
    for (const CurvePoint& c : curve.points()) pts.push_back({c.s * g, rot * c.p + h, c.theta + f, c.k / g});
    // A scaled soliton solves the same equation with (A, B) / g^2.
    const Params& p = curve.params();
    return PlaneCurve({p.A / (g * g), p.B / (g * g)}, std::move(pts));
}

double csf_residual(const PlaneCurve& curve, const Motion& motion, double t, double dt) {
    if (!(dt >= 1e-7 * motion.time_scale()))
        throw DomainError("csf_residual: dt below 1e-7 of the motion's time scale");
    check_time(motion, t - dt, "csf_residual");
    check_time(motion, t + dt, "csf_residual");
    const Complex a = std::polar(motion.g(t + dt), motion.f(t + dt));
    const Complex b = std::polar(motion.g(t - dt), motion.f(t - dt));
    const Complex dh = motion.H(t + dt) - motion.H(t - dt);
    const double g = motion.g(t), f = motion.f(t);
    double worst = 0.0;
    for (const CurvePoint& c : curve.points()) {
        const Complex v = ((a - b) * c.p + dh) / (2.0 * dt);
        const Complex n = Complex(0.0, 1.0) * std::polar(1.0, c.theta + f);
        const double normal_speed = v.real() * n.real() + v.imag() * n.imag();
        worst = std::max(worst, std::abs(normal_speed - c.k / g));
    }
    return worst;
}

CsfCheck check_csf(const PlaneCurve& curve, const Motion& motion) {
    CsfCheck out;
    out.time_scale = motion.time_scale();
    out.t = 0.1 * out.time_scale;
    double extent = 0.0, k_max = 0.0;
    for (const CurvePoint& c : curve.points()) {
        extent = std::max(extent, std::abs(c.p));
        k_max = std::max(k_max, std::abs(c.k));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int i = 0; i < 3; ++i) {
        const double dt = 1e-2 * out.time_scale / (1 << i);
        out.dts.push_back(dt);
        out.residuals.push_back(csf_residual(curve, motion, out.t, dt));
        out.floors.push_back(1e3 * eps * (extent / dt + k_max));
    }
    bool order_ok = true;
    for (std::size_t i = 1; i < out.dts.size(); ++i) {
        if (out.residuals[i - 1] <= out.floors[i - 1] || out.residuals[i] <= out.floors[i]) continue;
        const double order = std::log2(out.residuals[i - 1] / out.residuals[i]);
        out.order = out.order ? std::min(*out.order, order) : order;
        if (order < 1.9) order_ok = false;
    }
    out.fine_dt = 1e-4 * out.time_scale;
    out.fine_residual = csf_residual(curve, motion, out.t, out.fine_dt);
    out.passed = order_ok && out.fine_residual <= 1e-6;
    return out;
}

PlaneCurve grim_reaper(double scale, std::size_t n_samples, double half_width) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("grim_reaper: scale must be positive");
    if (n_samples < 2) throw DomainError("grim_reaper: need at least two samples");
    if (!(half_width > 0.0 && half_width < std::numbers::pi / 2.0))
        throw DomainError("grim_reaper: window must lie strictly inside (-pi/2, pi/2)");
    std::vector<CurvePoint> pts;
    pts.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double u = -half_width + 2.0 * half_width * static_cast<double>(i) / (n_samples - 1);
        pts.push_back({scale * std::atanh(std::sin(u)), scale * Complex(u, -std::log(std::cos(u))), u,
                       std::cos(u) / scale});
    }
    return PlaneCurve({0.0, 0.0}, std::move(pts));
}

double loop_area_rate(const LoopReport& loop, const Params& params) {
    if (!(params.B < 0.0)) throw DomainError("loop_area_rate: requires B < 0");
    if (!loop.crossing.resolved) throw DomainError("loop_area_rate: unresolved loop");
    const double turn = std::numbers::pi + loop.alpha;
    if (std::abs(loop.curvature_integral - turn) > 1e-4)
        throw SolverError("loop_area_rate: integral of k over the loop is " +
                          std::to_string(loop.curvature_integral) + ", expected pi + alpha = " +
                          std::to_string(turn));
    return -turn;
}

}  // namespace csf
