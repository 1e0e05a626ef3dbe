#include "csf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>

namespace csf {

namespace {

constexpr double pi = std::numbers::pi;

Complex unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

double natural_length(const Params& p) {
    const double m = p.magnitude();
    return m > 0.0 ? 1.0 / std::sqrt(m) : 1.0;
}

}  // namespace

PlaneCurve::PlaneCurve(Params params, std::vector<CurvePoint> points)
    : params_(params), points_(std::move(points)) {}

CurvePoint PlaneCurve::at(double s) const {
    if (points_.empty()) throw DomainError("PlaneCurve::at on empty curve");
    s = std::clamp(s, s_begin(), s_end());
    if (points_.size() == 1) return points_.front();
    auto it = std::upper_bound(points_.begin(), points_.end(), s,
                               [](double v, const CurvePoint& a) { return v < a.s; });
    if (it == points_.end()) --it;
    if (it == points_.begin()) ++it;
    const CurvePoint& a = *(it - 1);
    const CurvePoint& b = *it;
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

    const Complex ta = unit(a.theta), tb = unit(b.theta);
    const Complex I(0.0, 1.0);
    const Complex p = h0 * a.p + h1 * h * ta + h2 * h * h * (I * a.k * ta) + h3 * b.p +
                      h4 * h * tb + h5 * h * h * (I * b.k * tb);
    // theta' = k; cubic Hermite is enough for the tangent angle.
    const double c0 = 1 - 3 * t2 + 2 * t3, c1 = t - 2 * t2 + t3, c2 = 3 * t2 - 2 * t3,
                 c3 = -t2 + t3;
    const double theta = c0 * a.theta + c1 * h * a.k + c2 * b.theta + c3 * h * b.k;
    const double k = (1 - t) * a.k + t * b.k;
    return {s, p, theta, k};
}

PlaneCurve PlaneCurve::resampled(double max_ds) const {
    if (!(max_ds > 0.0)) throw DomainError("PlaneCurve::resampled: spacing must be positive");
    const double len = length();
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_ds)));
    std::vector<CurvePoint> pts;
    pts.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = i == n ? s_end() : s_begin() + len * static_cast<double>(i) / n;
        pts.push_back(at(s));
    }
    return PlaneCurve(params_, std::move(pts));
}

PlaneCurve reconstruct(const Trajectory& t) {
    const Params& p = t.params();
    if (p.degenerate()) throw DomainError("reconstruct: (A, B) = (0, 0)");
    const Complex denom(p.A, -p.B);
    std::vector<CurvePoint> pts;
    pts.reserve(t.size());
    for (const Sample& a : t.samples())
        pts.push_back({a.s, unit(a.theta) * Complex(a.x, a.y) / denom, a.theta, a.x});
    return PlaneCurve(p, std::move(pts));
}

double soliton_residual(const PlaneCurve& c) {
    const Params& p = c.params();
    double worst = 0.0;
    for (const CurvePoint& q : c.points()) {
        const Complex tn = q.p * std::conj(unit(q.theta));  // tau + i nu
        worst = std::max(worst, std::abs(p.A * tn.real() + p.B * tn.imag() - q.k));
    }
    return worst;
}

PolarTrace polar(const PlaneCurve& c) {
    PolarTrace out;
    const std::size_t n = c.size();
    out.r.reserve(n);
    out.phi.reserve(n);
    out.tau.reserve(n);
    out.nu.reserve(n);
    double prev_arg = 0.0, unwrapped = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const CurvePoint& q = c.points()[i];
        const Complex tn = q.p * std::conj(unit(q.theta));
        const double a = std::arg(tn);
        if (i == 0) {
            unwrapped = a;
        } else {
            unwrapped += std::remainder(a - prev_arg, 2.0 * pi);
        }
        prev_arg = a;
        out.r.push_back(std::abs(q.p));
        out.phi.push_back(q.theta + unwrapped);
        out.tau.push_back(tn.real());
        out.nu.push_back(tn.imag());
    }
    return out;
}

TotalCurvature total_curvature(const Trajectory& t) {
    TotalCurvature out;
    const Params& p = t.params();
    out.integral = t.samples().back().theta - t.samples().front().theta;
    if (!(p.A == 0.0 && p.B > 0.0)) return out;

    const double root = std::sqrt(p.B);
    const auto invariant = first_integral(p, t.samples().front().state(), 0.0);
    const double C = std::abs(*invariant);
    // Beyond the forward end y keeps decreasing, beyond the backward end it keeps
    // increasing; the bound needs y already on the outgoing side.
    const double y_end = t.samples().back().y / root;
    const double y_begin = t.samples().front().y / root;
    if (!(y_end <= 0.0 && y_begin >= 0.0)) return out;
    auto tail = [&](double y) {
        return C * std::sqrt(pi / 2.0) * std::erfc(std::abs(y) / std::sqrt(2.0));
    };
    out.tail_bound = tail(y_end) + tail(y_begin);
    out.value = out.integral + (out.integral >= 0.0 ? 0.5 : -0.5) * out.tail_bound;
    out.converged = true;
    return out;
}

ExcursionReport excursions(const Trajectory& t) {
    const Params& p = t.params();
    if (!(p.A == 0.0 && p.B < 0.0)) throw DomainError("excursions: requires A = 0 and B < 0");
    ExcursionReport out;
    const Sample& first = t.samples().front();
    const double beta = p.beta();
    const double scale_tol = 1e3 * std::max(t.tol(), 1e-15) * beta;
    bool fixed = true;
    for (const Sample& a : t.samples())
        if (std::abs(std::abs(a.x) - beta) > scale_tol || std::abs(a.y) > scale_tol) {
            fixed = false;
            break;
        }
    if (fixed && std::abs(first.x) > 0.0) {
        out.circle = true;
        return out;
    }

    std::vector<double> minima;
    const auto& ss = t.samples();
    for (std::size_t i = 1; i < ss.size(); ++i) {
        if (!(ss[i - 1].y < 0.0 && ss[i].y >= 0.0)) continue;
        auto g = [&](double s) { return t.at(s).y; };
        auto done = [](double a, double b) { return std::abs(b - a) <= 1e-13; };
        std::uintmax_t iters = 200;
        const auto br = boost::math::tools::toms748_solve(g, ss[i - 1].s, ss[i].s, ss[i - 1].y,
                                                          ss[i].y, done, iters);
        minima.push_back(0.5 * (br.first + br.second));
    }
    if (minima.size() < 2)
        throw DomainError("excursions: span contains fewer than one full excursion");
    for (std::size_t i = 1; i < minima.size(); ++i)
        out.excursions.push_back(
            {minima[i - 1], minima[i], t.at(minima[i]).theta - t.at(minima[i - 1]).theta});
    return out;
}

AsymptoticDirections asymptotic_direction(const PlaneCurve& c, double growth_factor) {
    const Params& p = c.params();
    if (p.A == 0.0) throw DomainError("asymptotic_direction: requires a spiral case (A != 0)");
    double r_min = std::abs(c.points().front().p);
    for (const CurvePoint& q : c.points()) r_min = std::min(r_min, std::abs(q.p));
    const double r_ref = std::max(r_min, natural_length(p));
    const Complex limit = Complex(p.B, p.A) / p.magnitude();
    const Complex denom(p.A, -p.B);

    auto end_direction = [&](const CurvePoint& q) -> std::optional<EndDirection> {
        const double r = std::abs(q.p);
        if (r < growth_factor * r_ref) return std::nullopt;
        const Complex T = unit(q.theta);
        const Complex xy = denom * q.p * std::conj(T);  // x + i y
        EndDirection d;
        d.empirical = r * T / q.p;
        d.theoretical = (xy.imag() < 0.0 ? 1.0 : -1.0) * limit;
        d.deviation = std::abs(d.empirical - d.theoretical);
        d.growth = r / r_ref;
        return d;
    };
    AsymptoticDirections out{end_direction(c.points().front()), end_direction(c.points().back())};
    if (!out.begin && !out.end)
        throw DomainError("asymptotic_direction: no arm escapes far enough (non-spiral input)");
    return out;
}

}  // namespace csf
