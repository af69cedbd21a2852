#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "soulcurv/chart.hpp"
#include "soulcurv/linalg.hpp"
#include "soulcurv/metric.hpp"

namespace soulcurv {

struct IntegrationOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.05;
    double chart_switch_radius2 = 4.0; // |u|^2 beyond which we flip charts
    bool reproject = true;             // per-step frame re-projection
};

enum class SegmentKind { Integrated, SoulArc, ChartLine };

// Piecewise description of a curve; transports re-integrate segment by
// segment, so accuracy never depends on stored sample spacing.
struct CurveSegment {
    SegmentKind kind = SegmentKind::Integrated;
    double duration = 0.0;
    ChartPoint start;
    ChartPoint end;
    Vec5 v0{}; // Integrated: initial velocity

    // SoulArc: ambient great circle cos(t) P + sin(t) Q on the soul,
    // parameterized by base-sphere angle
    Vec3 arc_p{}, arc_q{};

    // ChartLine: chart-affine path start + t * (du, dv), no chart switching
    Vec2 line_du{};
    Vec3 line_dv{};
};

struct CurveSample {
    double t;
    ChartPoint x;
    Vec5 v;
};

struct Curve {
    std::vector<CurveSegment> segments;
    std::vector<CurveSample> samples; // for inspection; transports do not interpolate
    int chart_switches = 0;

    double duration() const {
        double d = 0.0;
        for (const auto& s : segments) d += s.duration;
        return d;
    }
    const ChartPoint& start() const { return segments.front().start; }
    const ChartPoint& end() const { return segments.back().end; }
    double closure() const { return ambient_distance(start(), end()); }
};

// Geodesic through (pt, v) for parameter time T (adaptive Dormand-Prince with
// chart switching near stereographic infinity).
Curve geodesic(const MetricModel& model, const ChartPoint& pt, const Vec5& v, double T,
               const IntegrationOptions& opts = {});

// Great-circle arc on the soul from a soul point in an ambient tangent
// direction, parameterized by base-sphere angle.
Curve soul_arc(const ChartPoint& from, const Vec3& ambient_dir, double angle);
// Arc connecting two soul points (the minor great circle between them).
Curve soul_arc_between(const ChartPoint& a, const ChartPoint& b);
// Closed geodesic triangle through three soul points.
Curve soul_triangle(const ChartPoint& a, const ChartPoint& b, const ChartPoint& c);
// Closed coordinate rectangle [0,h1]x[0,h2] in the u-plane at the point.
Curve coordinate_rectangle(const ChartPoint& corner, double h1, double h2);
// Rectangle of sides (h1, h2) centered and based at the point (holonomy logs
// compare directly against the curvature there).
Curve centered_rectangle_loop(const ChartPoint& center, double h1, double h2);

Curve reversed(const Curve& c);

enum class TransportMode { Ambient, Normal };

struct TransportResult {
    std::vector<Vec5> vectors;
    ChartPoint end;
    double gram_drift = 0.0; // max |Gram(t) - Gram(0)| entry over accepted steps
};

// Parallel transport of one or more vectors along the curve. Normal mode
// projects the connection to the normal bundle of the soul (curve must lie on
// it) and keeps frames orthonormal per accepted step when opts.reproject.
TransportResult parallel_transport(const MetricModel& model, const Curve& curve, const std::vector<Vec5>& vectors,
                                   TransportMode mode, const IntegrationOptions& opts = {});

struct HolonomyElement {
    Mat3 rotation;   // action on the normal frame at the basepoint
    Vec3 log;        // axis-angle of the rotation
    double closure;  // ambient gap of the loop endpoints
    double ortho_residual;
};

// Normal-bundle holonomy of a closed loop on the soul, expressed in the
// orthonormal normal frame of soul_frame at the basepoint.
HolonomyElement holonomy_loop(const MetricModel& model, const Curve& loop, const IntegrationOptions& opts = {});

struct HolonomyAlgebra {
    int dimension = 0;
    std::vector<double> singular_values; // of the stacked log-axis matrix
    std::vector<Mat3> basis;
    int subdivided = 0; // loops split due to near-pi logarithm branches
};

// Dimension of the Lie algebra spanned by matrix logs of loop holonomies.
// Triangles whose rotation angle lands near pi are subdivided automatically.
HolonomyAlgebra holonomy_algebra(const MetricModel& model, const std::vector<Curve>& loops,
                                 double threshold = 1e-5, const IntegrationOptions& opts = {});

// Seeded basket of geodesic triangles with vertices from a low-discrepancy
// set on the soul.
std::vector<Curve> triangle_basket(int count, double seed_offset);

} // namespace soulcurv
