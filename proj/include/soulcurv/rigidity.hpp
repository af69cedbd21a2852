#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "soulcurv/curvature.hpp"
#include "soulcurv/metric.hpp"
#include "soulcurv/rng.hpp"
#include "soulcurv/transport.hpp"

namespace soulcurv {

// ---------------------------------------------------------------------------
// nullity section
// ---------------------------------------------------------------------------

struct NullityVector {
    Vec5 W{};          // unit kernel axis of the normal curvature operator
    double F = 0.0;    // operator norm of the normal curvature
    bool indeterminate = false;
};

// Kernel axis at one soul point, oriented so that R(X,Y) z = F z x W for the
// oriented tangent pair (consistent across the soul).
NullityVector nullity_at(const MetricModel& model, const ChartPoint& pt, double f_floor = 1e-7);

struct NullityField {
    std::vector<ChartPoint> points;
    std::vector<Vec5> W;
    std::vector<double> F;
    std::vector<bool> indeterminate; // flagged and filled from neighbors
    int filled = 0;
    bool trivial = false; // every sample indeterminate (flat normal bundle)
};

NullityField nullity_section(const MetricModel& model, const std::vector<ChartPoint>& samples,
                             double f_floor = 1e-7);

// ---------------------------------------------------------------------------
// pointwise scalars and derivatives along the soul
// ---------------------------------------------------------------------------

struct SoulScalars {
    double F = 0.0;   // |R normal| operator norm
    double a = 0.0;   // |nabla_X W|
    double g0 = 0.0;  // R(W,U,U,W)
    double g1 = 0.0;  // R(U,V,V,U)
    Vec5 X{}, Y{}, W{}, U{}, V{};
};

// X is a g-unit tangent chart vector at the soul point.
SoulScalars soul_scalars(const MetricModel& model, const ChartPoint& pt, const Vec5& X, double stencil = 5e-3);

using SoulField = std::function<double(const ChartPoint&)>;

// covariant hessian of a scalar field on the soul: second derivative along
// the geodesic through (pt, X)
double hessian_on_soul(const MetricModel& model, const SoulField& field, const ChartPoint& pt, const Vec5& X,
                       double stencil = 2e-2);
double derivative_on_soul(const MetricModel& model, const SoulField& field, const ChartPoint& pt, const Vec5& X,
                          double stencil = 5e-3);

// scalar fields of the nullity geometry, usable as SoulField
double field_F(const MetricModel& model, const ChartPoint& pt);
double field_g0(const MetricModel& model, const ChartPoint& pt);
double field_g1(const MetricModel& model, const ChartPoint& pt);

// transport-based <(D_X Rn)(X,Y) E1, E2>: the normal-projected connection
// derivative, the independent cross-check of the ambient dR contraction
double normal_curvature_derivative_transport(const MetricModel& model, const ChartPoint& pt, const Vec5& X,
                                             const Vec5& E1, const Vec5& E2, double stencil = 5e-3);

// ---------------------------------------------------------------------------
// the soul inequality
// ---------------------------------------------------------------------------

struct RigidityGap {
    // ambient form: lhs = <(D_X R)(X,Y)E1,E2>^2,
    // rhs = (|R(E1,E2)X|^2 + (2/3)(D_{X,X}R)(E1,E2,E2,E1)) R(X,Y,Y,X)
    double lhs_ambient = 0.0, rhs_ambient = 0.0, gap_ambient = 0.0;
    // normal-bundle form with |Rn(E1,E2)X| = |<Rn(X,Y)E1,E2>|
    double lhs_normal = 0.0, rhs_normal = 0.0, gap_normal = 0.0;
    double form_difference = 0.0; // gap_ambient - gap_normal
};

// (X,Y) orthonormal tangent, (E1,E2) orthonormal normal at a soul point.
RigidityGap rigidity_gap(const CurvaturePacket& packet, const Vec5& X, const Vec5& Y, const Vec5& E1, const Vec5& E2);
RigidityGap rigidity_gap(const MetricModel& model, const ChartPoint& pt, const Vec5& X, const Vec5& Y, const Vec5& E1,
                         const Vec5& E2);

struct NullityResiduals {
    double r1 = 0.0; // k (F^2 + (2/3) hess g1 - (4a^2/3)(g1-g0)) - (XF)^2
    double r2 = 0.0; // (2/3) k (hess g0 + 2a^2 (g1-g0)) - a^2 F^2
    double r3 = 0.0; // (2/3) k hess g0
    SoulScalars scalars;
    double hess_g0 = 0.0, hess_g1 = 0.0, xf = 0.0, gauss = 0.0;
};

NullityResiduals nullity_residuals(const MetricModel& model, const ChartPoint& pt, const Vec5& X);

// ---------------------------------------------------------------------------
// nullity plane residual along a geodesic (W'' stays in span{W, W'})
// ---------------------------------------------------------------------------

struct NullityPlaneResidual {
    double max_residual = 0.0;
    bool parallel_branch = false; // |W'| ~ 0, residual measured against span{W}
    double cross_check = 0.0;     // (D_{X,X}R)(U,V,W,V) - (g1-g0) <W'', U> at t = 0
};

NullityPlaneResidual nullity_plane_residual(const MetricModel& model, const ChartPoint& pt, const Vec5& X,
                                            double half_length, int grid_points = 21);

// ---------------------------------------------------------------------------
// curvature minimization over 2-planes
// ---------------------------------------------------------------------------

struct MinSectionalResult {
    double value = 0.0;
    std::array<Vec5, 2> frame{}; // g-orthonormal argmin pair (chart components)
    int failed_restarts = 0;
};

// Gradient descent with backtracking over orthonormal 2-frames (QR
// retraction), best of `restarts` seeded starts; restrict_to_sphere_block
// searches only the S^2-factor plane.
MinSectionalResult min_sectional(const MetricModel& model, const ChartPoint& pt, int restarts, Rng& rng,
                                 bool restrict_to_sphere_block = false);

// brute-force oracle: min over `count` seeded random planes
double min_sectional_brute(const MetricModel& model, const ChartPoint& pt, int count, Rng& rng);

// ---------------------------------------------------------------------------
// quasi-strictness scan
// ---------------------------------------------------------------------------

struct ScanPlan {
    int soul_points = 50;
    int normal_directions = 20;
    int frame_seeds = 40;
    std::uint64_t seed = 12345;
    double gap_tolerance = 1e-5;
};

struct ScanRecord {
    int point_index = 0;
    int direction_index = 0;
    double alpha = 0.0, beta = 0.0; // frame angles at the minimum
    double lhs = 0.0, rhs = 0.0;    // stored operands (normal form)
    double min_gap = 0.0;
    double min_gap_ambient = 0.0;
    // <E1, W>^2 + <E2, W>^2 of the minimizing plane against the nullity axis
    double axis_containment = 0.0;
};

struct RigidityReport {
    std::vector<ScanRecord> records; // one per (point, direction)
    double min_gap = 0.0;            // global min over records
    double worst_direction_gap = 0.0; // max over records of min_gap
    double min_gap_ambient = 0.0;
    bool quasi_strict = false; // true iff some direction keeps a positive gap
    int indeterminate = 0;
    std::uint64_t seed = 0;
    ScanPlan plan;
};

RigidityReport quasi_strict_scan(const MetricModel& model, const ScanPlan& plan);

// deterministic soul sample set shared by scan commands
std::vector<ChartPoint> soul_samples(int count, std::uint64_t seed);

} // namespace soulcurv
