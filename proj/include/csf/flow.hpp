#pragma once

#include <optional>
#include <vector>

#include "csf/geometry.hpp"
#include "csf/phase.hpp"

namespace csf {

/// X(t) = g(t) exp(i f(t)) X(0) + H(t).
struct Motion {
    Params params;
    /// Translation velocity; drives H only when A = B = 0.
    std::optional<Complex> velocity;
    /// Center of the screw-dilation, -C / (B + iA), when a velocity was supplied with
    /// (A, B) != (0, 0). Reported only; the motion itself is about the origin.
    std::optional<Complex> recentering;

    double f(double t) const;
    double g(double t) const;
    Complex H(double t) const;
    /// -1/(2B) for B < 0.
    std::optional<double> t_max() const;
    /// Time over which the motion changes the curve by O(1) of its natural size.
    double time_scale() const;
    /// The motion that continues this one from time t1, so that
    /// evolve(evolve(c, m, t1), m.shifted(t1), t2) = evolve(c, m, t1 + t2).
    Motion shifted(double t1) const;
};

Motion motion_for(const Params& params, std::optional<Complex> velocity = std::nullopt);

/// Applies the motion at time t. Curvature is rescaled as k / g.
PlaneCurve evolve(const PlaneCurve& curve, const Motion& motion, double t);

/// max over samples of |<dX/dt, N> - k| at time t, with dX/dt from a central difference.
double csf_residual(const PlaneCurve& curve, const Motion& motion, double t, double dt);

struct CsfCheck {
    double t = 0.0;
    double time_scale = 0.0;
    /// Halving sweep dt = (1, 1/2, 1/4) * 1e-2 * time_scale.
    std::vector<double> dts;
    std::vector<double> residuals;
    /// Rounding level of each residual; a residual below it carries no order information.
    std::vector<double> floors;
    /// Smallest log2 ratio over consecutive halvings that are above the floor.
    std::optional<double> order;
    double fine_dt = 0.0;  // 1e-4 * time_scale
    double fine_residual = 0.0;
    bool passed = false;
};

/// Order-of-convergence check of csf_residual at t = 0.1 * time_scale: passes when every
/// halving above rounding gains at least 2^1.9 and the residual at fine_dt is <= 1e-6.
CsfCheck check_csf(const PlaneCurve& curve, const Motion& motion);

/// Grim Reaper scale (u, -log cos u) for |u| <= half_width, n samples uniform in u.
/// Translates with velocity (0, 1) / scale.
PlaneCurve grim_reaper(double scale, std::size_t n_samples, double half_width = 1.5);

/// Rate of change of the area enclosed by a loop, -(pi + alpha). Throws SolverError when
/// the integral of k over the loop disagrees with pi + alpha by more than 1e-4.
double loop_area_rate(const LoopReport& loop, const Params& params);

}  // namespace csf
