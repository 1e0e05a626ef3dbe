#pragma once

#include <optional>
#include <string>
#include <utility>

#include "csf/geometry.hpp"
#include "csf/phase.hpp"

namespace csf {

enum class SolitonTag {
    Line,
    GrimReaper,
    Circle,
    Expander,
    AbreschLanger,
    DenseShrinker,
    Rotator,
    RotatingExpander,
    RotatingShrinkerType1,
    CometSpiral,
    Undetermined,
};

std::string to_string(SolitonTag tag);

struct SolitonClass {
    SolitonTag tag = SolitonTag::Undetermined;
    std::optional<std::pair<int, int>> pq;  // AbreschLanger only
    std::optional<double> limit_radius;     // 1/sqrt(-B) when B < 0
    std::optional<double> delta_theta;      // shrinkers: tangent turn per excursion
    std::string diagnostics;
};

struct ShootingResult {
    double parameter = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double residual = 0.0;
    int evaluations = 0;
    Trajectory trajectory;
};

/// Tangent turn over one excursion of the shrinker A = 0, B = -1 whose outer radius is
/// r_max (> 1). One period runs from (r_max, 0) to the next downward crossing of y = 0.
double delta_theta(double r_max, double tol = 1e-12);

/// The r_max of the shrinker (A = 0, B = -1) orbit through `u`, from its first integral.
double shrinker_r_max(const PhaseState& u);

struct AbreschLangerResult {
    int p = 0;
    int q = 0;
    double target = 0.0;  // 2 pi p / q
    ShootingResult shot;  // parameter = r_max; trajectory covers q excursions
    double closure = 0.0; // |X(end) - X(0)|
};

/// Closed shrinker with rotation number p touching each annulus boundary q times.
/// Requires gcd(p, q) = 1 and 1/2 < p/q < sqrt(2)/2.
AbreschLangerResult find_abresch_langer(int p, int q, double tol = 1e-12);

struct CometOptions {
    /// Bracket width for the bisection on the section, in normalized units.
    double bracket_tol = 1e-10;
    double integration_tol = 1e-11;
    /// The tail is followed until y < -y_max (normalized units).
    double y_max = 50.0;
    /// Section x = section_fraction * beta on which y0 is solved.
    double section_fraction = 0.5;
    /// Forward span used to settle on the sink, normalized arc length.
    double forward_span = 4000.0;
};

struct CometResult {
    Normalization normalization;
    Params normalized_params;
    double section_x = 0.0;  // original coordinates
    /// Bisection on the section; parameter and bracket are y0 in original coordinates.
    ShootingResult shot;
    /// y where the forward-integrated tail meets the section (original coordinates).
    double tail_crossing_y = 0.0;
    /// Classification on a grid over the initial bracket was a single switch.
    bool monotone = true;
    /// The tail run stayed in 0 < x < beta down to y < -y_max.
    bool tail_in_strip = true;
    /// Distance of the forward end from the sink (beta, -A/beta).
    double sink_distance = 0.0;
};

/// Rotating shrinker (A != 0, B < 0) with one end on the limit circle and the other
/// spiralling out. The returned trajectory has s = 0 on the section and runs from deep
/// in the tail (y < -y_max) to the sink.
CometResult find_comet_spiral(const Params& params, const CometOptions& opts = {});

struct ExpanderResult {
    Trajectory trajectory;  // symmetric about s = 0, where x = x_max = r_min
    TotalCurvature total_curvature;
};

/// Expander (A = 0, B > 0) through (x0, 0), integrated until the curvature tails are
/// below `tail_tol`.
ExpanderResult solve_expander(const Params& params, double x0, double tol = 1e-12,
                              double tail_tol = 1e-15);

/// Drops the ends of t that have settled on a fixed point: each end is cut where the phase
/// state last comes within `tol` (relative to the fixed point's norm) of it.
/// Ends that do not converge to a fixed point are kept.
Trajectory trim_settled(const Trajectory& t, double tol = 1e-3);

struct ClassifyOptions {
    /// Arc-length horizon in normalized units.
    double horizon = 2000.0;
    double tol = 1e-9;
    int max_denominator = 200;
    double comet_distance = 1e-6;
};

SolitonClass classify(const Params& params, const PhaseState& init,
                      const ClassifyOptions& opts = {});

/// Continued-fraction convergent p/q of `ratio` with q <= max_q and |ratio - p/q| <= tol q.
std::optional<std::pair<int, int>> rational_match(double ratio, int max_q, double tol);

}  // namespace csf
