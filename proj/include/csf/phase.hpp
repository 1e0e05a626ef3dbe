#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace csf {

/// Raised when inputs violate an operation's preconditions.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical solve cannot produce a trustworthy answer.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rotation rate A and dilation rate B of the self-similar motion at t = 0.
struct Params {
    double A = 0.0;
    double B = 0.0;

    bool degenerate() const { return A == 0.0 && B == 0.0; }
    /// sqrt(-B); only meaningful when B < 0.
    double beta() const;
    /// |(A, B)|; the soliton curve scales like magnitude()^(-1/2).
    double magnitude() const;
};

/// A point of the phase plane. x is the signed curvature of the soliton.
struct PhaseState {
    double x = 0.0;
    double y = 0.0;

    double norm() const;
};

PhaseState rhs(const Params& p, const PhaseState& u);

enum class EventKind { YZero, XZero, XEqualsBeta, XLevel, YLevel, NormExceedsThreshold };

/// Crossing direction measured along increasing arc length.
enum class Crossing { Any, Rising, Falling };

struct EventSpec {
    EventKind kind = EventKind::YZero;
    Crossing direction = Crossing::Any;
    /// Stop the branch after this many occurrences; 0 only records.
    int stop_after = 0;
    /// Level for XLevel and YLevel events.
    double level = 0.0;
};

struct Event {
    EventKind kind;
    double s;
    PhaseState state;
    double theta;
    /// Index into the requested event list; -1 for the norm cut-off.
    int spec_index;
};

struct Sample {
    double s;
    double x;
    double y;
    double theta;

    PhaseState state() const { return {x, y}; }
};

struct IntegrateOptions {
    /// Local error tolerance of the embedded pair (mixed absolute/relative).
    double tol = 1e-10;
    /// Root tolerance for event location, in arc length.
    double event_tol = 1e-12;
    /// Trajectories whose phase norm exceeds this are truncated.
    double norm_threshold = 1e6;
    /// Upper bound on the step, in units of the natural length 1/sqrt|(A,B)|.
    double max_step = 0.1;
    std::size_t max_steps = 20'000'000;
    std::vector<EventSpec> events;
};

/// Adaptive samples of one solution of x' = xy + A, y' = -x^2 - B, theta' = x.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(Params params, std::vector<Sample> samples, std::vector<Event> events,
               double tol);

    const Params& params() const { return params_; }
    const std::vector<Sample>& samples() const { return samples_; }
    const std::vector<Event>& events() const { return events_; }
    double tol() const { return tol_; }

    double s_begin() const { return samples_.front().s; }
    double s_end() const { return samples_.back().s; }
    bool empty() const { return samples_.empty(); }
    std::size_t size() const { return samples_.size(); }

    /// Quintic Hermite interpolation of (x, y, theta) using the exact vector field.
    Sample at(double s) const;

    std::vector<Event> events_of(EventKind kind) const;
    bool truncated() const;

private:
    Params params_;
    std::vector<Sample> samples_;
    std::vector<Event> events_;
    double tol_ = 0.0;
};

/// Integrates over [s_lo, s_hi] (s_lo <= 0 <= s_hi) from `init` at s = 0 with
/// theta(0) = 0. The backward branch uses negative steps.
Trajectory integrate(const Params& p, const PhaseState& init, double s_lo, double s_hi,
                     const IntegrateOptions& opts = {});

/// Conserved quantity of the three integrable cases, if one applies:
///   A = 0, B < 0:  x exp(-(x^2+y^2)/2) in coordinates rescaled to B = -1
///   A = 0, B > 0:  x exp(+(x^2+y^2)/2) in coordinates rescaled to B = 1
///   B = 0, A != 0: (x^2+y^2)/A^2 - (2/A) theta
std::optional<double> first_integral(const Params& p, const PhaseState& u, double theta);

enum class FixedPointType { SinkSpiral, SinkNode, SinkDegenerateNode, SourceSpiral, SourceNode,
                            SourceDegenerateNode, Center };

struct Eigenvalue {
    double re;
    double im;
};

struct FixedPoint {
    PhaseState state;
    std::array<Eigenvalue, 2> eigenvalues;
    FixedPointType type;
};

/// Fixed points with the eigenvalues of the linearization [[y, x], [-2x, 0]].
/// Eigenvalues are reported in the caller's coordinates; for A = 1, B = -beta^2 they
/// reduce to (-1 +- sqrt(1 - 8 beta^4)) / (2 beta).
std::vector<FixedPoint> fixed_points(const Params& p);

std::string to_string(FixedPointType t);
std::string to_string(EventKind k);

/// Maps a problem onto A = +-1 (or B = +-1 when A = 0) by rescaling, and optionally onto
/// A > 0 by reflecting the curve. Rescaling (A, B) by c maps (x, y) -> (x, y) / sqrt(c)
/// and s -> s sqrt(c); reflection maps (x, theta) -> (-x, -theta).
struct Normalization {
    double scale = 1.0;
    bool reflected = false;

    static Normalization for_params(const Params& p, bool reflect_to_positive_A);

    Params apply(const Params& p) const;
    PhaseState apply(const PhaseState& u) const;
    PhaseState restore(const PhaseState& u) const;
    /// Maps a trajectory computed in normalized coordinates back to `original`.
    Trajectory restore(const Trajectory& t, const Params& original) const;
};

/// The part of t with s in [s_lo, s_hi], clipped to the computed span.
Trajectory slice(const Trajectory& t, double s_lo, double s_hi);

/// s -> -(x(-s), y(-s)): the same curve traversed backwards.
Trajectory reversed(const Trajectory& t);

}  // namespace csf
