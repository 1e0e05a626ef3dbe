#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "csf/geometry.hpp"
#include "csf/phase.hpp"

namespace csf {

inline constexpr const char* kCsvHeader = "s,x,y,theta,px,py,r,phi";

/// One row per curve sample, every value printed with %.17g. When `phase` is given it must
/// be the trajectory the curve was reconstructed from; otherwise (x, y) are recovered from
/// x + iy = (A - iB) exp(-i theta) X, and y is 0 for a translator.
void write_csv(std::ostream& os, const PlaneCurve& curve, const Trajectory* phase = nullptr);

/// Parses the columns s, x, y, theta of a CSV with a header row (other columns ignored).
std::vector<Sample> read_phase_csv(std::istream& is);

struct SvgOptions {
    /// Written as an XML comment; suppress for byte-identical output.
    bool timestamp = true;
    /// Free text (typically JSON) placed in <metadata>.
    std::string metadata;
    double width_px = 800.0;
};

/// Polylines of the given curves; the viewBox fits all points with a 5% margin and the
/// y axis points up.
void write_svg(std::ostream& os, const std::vector<PlaneCurve>& curves, const SvgOptions& opts = {});

/// Points for plotting: uniform in s, at most max_points.
std::vector<Complex> plot_points(const PlaneCurve& c, std::size_t max_points = 20000);

}  // namespace csf
