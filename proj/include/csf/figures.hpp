#pragma once

#include <string>
#include <vector>

#include "csf/geometry.hpp"
#include "csf/phase.hpp"

namespace csf {

struct FigureSpec {
    std::string name;
    std::string description;
    Params params;
    /// How the curves are produced, e.g. "x0=0 y0=3 span=60".
    std::string setup;
};

struct Figure {
    FigureSpec spec;
    std::vector<PlaneCurve> curves;
};

struct FigureSignature {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
    /// Tangent turning (theta_end - theta_begin) / 2 pi, per curve.
    std::vector<double> winding;
    /// Self-intersections summed over the curves.
    std::size_t crossings = 0;
    std::size_t unresolved = 0;
    std::vector<double> loop_areas;
};

const std::vector<FigureSpec>& figure_catalog();

/// Builds a catalogued figure; throws DomainError for an unknown name.
Figure make_figure(const std::string& name);

FigureSignature figure_signature(const Figure& f);

/// The connected piece of c around s = 0 that stays within `radius` of the origin.
PlaneCurve clip_to_disk(const PlaneCurve& c, double radius);

}  // namespace csf
