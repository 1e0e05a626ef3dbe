#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "csf/phase.hpp"

namespace csf {

using Complex = std::complex<double>;

struct CurvePoint {
    double s;
    Complex p;
    double theta;  // tangent angle, T = exp(i theta)
    double k;      // signed curvature
};

/// Arc-length sampled planar curve. Between samples it is evaluated by quintic
/// Hermite interpolation using p' = T and p'' = i k T.
class PlaneCurve {
public:
    PlaneCurve() = default;
    PlaneCurve(Params params, std::vector<CurvePoint> points);

    const Params& params() const { return params_; }
    const std::vector<CurvePoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    double s_begin() const { return points_.front().s; }
    double s_end() const { return points_.back().s; }
    double length() const { return s_end() - s_begin(); }

    CurvePoint at(double s) const;

    /// Uniform-in-s resampling with spacing at most max_ds.
    PlaneCurve resampled(double max_ds) const;

private:
    Params params_;
    std::vector<CurvePoint> points_;
};

/// X = exp(i theta) (x + i y) / (A - i B), evaluated per sample.
PlaneCurve reconstruct(const Trajectory& t);

/// max over samples of |A<X,T> + B<X,N> - k|.
double soliton_residual(const PlaneCurve& c);

struct PolarTrace {
    std::vector<double> r;
    std::vector<double> phi;  // continuous argument of X
    std::vector<double> tau;  // <X, T>
    std::vector<double> nu;   // <X, N>
};

PolarTrace polar(const PlaneCurve& c);

struct TotalCurvature {
    bool converged = false;
    double value = 0.0;
    /// Integral of x over the computed span.
    double integral = 0.0;
    /// Rigorous bound on the curvature outside the span (both ends).
    double tail_bound = 0.0;
};

/// Total curvature of an expander (A = 0, B > 0). The curvature beyond each end is
/// bounded with the first integral: x <= C exp(-y^2/2) and |dy/ds| >= 1 in rescaled
/// coordinates. Other cases have divergent total curvature and return converged = false.
TotalCurvature total_curvature(const Trajectory& t);

struct DoublePoint {
    double s1;  // s1 < s2
    double s2;
    Complex point;
    /// sin of the angle between the two tangents.
    double sin_angle;
    bool resolved;
};

struct LoopReport {
    DoublePoint crossing;
    /// Interior angle at the double point with the enclosed region on the left, in (0, 2 pi).
    double alpha;
    double enclosed_area;
    std::optional<double> predicted_area;  // -(pi + alpha) / (2B) when B < 0
    /// Signed integral of k over the loop, oriented with the enclosed region on the left.
    double curvature_integral;
    bool counterclockwise;
};

struct IntersectionOptions {
    /// Resampling spacing in units of the natural length 1/sqrt|(A,B)|.
    double max_chord = 0.02;
    /// Crossings with |sin(angle)| below this are reported as unresolved.
    double min_sin_angle = 1e-5;
};

struct IntersectionReport {
    std::vector<DoublePoint> crossings;
    /// Loops whose sub-arc contains no other crossing parameter (simple closed arcs).
    std::vector<LoopReport> loops;
    std::size_t unresolved = 0;
};

IntersectionReport self_intersections(const PlaneCurve& c, const IntersectionOptions& opts = {});

struct Excursion {
    double s_start;
    double s_end;
    double delta_theta;
};

struct ExcursionReport {
    /// The trajectory sits at a fixed point: the curve is the circle of radius 1/sqrt(-B).
    bool circle = false;
    std::vector<Excursion> excursions;
};

/// Splits a shrinker trajectory (A = 0, B < 0) at its r-minima, i.e. the upward
/// zero crossings of y.
ExcursionReport excursions(const Trajectory& t);

struct EndDirection {
    Complex empirical;    // r T / X at the end sample
    Complex theoretical;  // -sign(y) (B + iA) / |(A, B)|
    double deviation;
    double growth;        // r at the end over the reference radius
};

struct AsymptoticDirections {
    std::optional<EndDirection> begin;
    std::optional<EndDirection> end;
};

/// Limit of r T / X along each arm that escapes to infinity. An end qualifies when r has
/// grown by `growth_factor` over max(r_min, natural length).
AsymptoticDirections asymptotic_direction(const PlaneCurve& c, double growth_factor = 50.0);

}  // namespace csf
